//! Ensemble members: a hashed bag-of-words softmax regression trained with
//! seeded mini-batch gradient descent, and externally produced prediction
//! files wrapped as predictors.

use std::collections::HashMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::augment::{self, fnv1a64_lowercase, AugmentResources, AugmentationConfig};
use crate::error::{Error, Result};
use crate::types::{normalize, Document, LabelSet, PredictionTensor, ProbVector};

/// Sparse vector as `(bucket, value)` pairs sorted by bucket.
pub type SparseVector = Vec<(usize, f64)>;

/// Lowercased words of title and body, hashed with FNV-1a 64 modulo `dim`,
/// counted and L2-normalized. A text without words maps to the zero vector.
pub fn featurize(doc: &Document, dim: usize) -> SparseVector {
    let mut buckets: Vec<usize> = [doc.title(), doc.body()]
        .into_iter()
        .flat_map(augment::words)
        .map(|w| (fnv1a64_lowercase(w) % dim as u64) as usize)
        .collect();
    buckets.sort_unstable();
    let mut v: SparseVector = Vec::new();
    for b in buckets {
        match v.last_mut() {
            Some((last, count)) if *last == b => *count += 1.0,
            _ => v.push((b, 1.0)),
        }
    }
    let norm = v.iter().map(|(_, x)| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for (_, x) in &mut v {
            *x /= norm;
        }
    }
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToyModelConfig {
    pub feature_dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub batch_size: usize,
    pub seed: u64,
    /// When set, every epoch trains on a freshly augmented copy of each
    /// document.
    pub train_augment: Option<AugmentationConfig>,
}

impl Default for ToyModelConfig {
    fn default() -> Self {
        Self {
            feature_dim: 4096,
            epochs: 10,
            learning_rate: 0.1,
            l2: 1e-4,
            batch_size: 16,
            seed: 0,
            train_augment: None,
        }
    }
}

impl ToyModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.feature_dim < 16 {
            return Err(Error::Config(format!("feature_dim = {} is below 16", self.feature_dim)));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(Error::Config("l2 must be non-negative".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        if let Some(aug) = &self.train_augment {
            aug.validate()?;
        }
        Ok(())
    }
}

const MODEL_FORMAT: &str = "uatta-toy-model";
const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    id: String,
    labels: LabelSet,
    config: ToyModelConfig,
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

/// A trained softmax regression over hashed features.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyModel {
    id: String,
    labels: LabelSet,
    config: ToyModelConfig,
    /// Row-major `K × feature_dim`.
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl ToyModel {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn config(&self) -> &ToyModelConfig {
        &self.config
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    fn logits(&self, x: &[(usize, f64)]) -> Vec<f64> {
        let dim = self.config.feature_dim;
        (0..self.labels.len())
            .map(|c| {
                let row = &self.weights[c * dim..(c + 1) * dim];
                self.bias[c] + x.iter().map(|&(i, v)| row[i] * v).sum::<f64>()
            })
            .collect()
    }

    fn probabilities(&self, x: &[(usize, f64)]) -> Vec<f64> {
        softmax(&self.logits(x))
    }

    /// Mean cross-entropy over labelled documents plus `l2/2 · ‖W‖²`.
    pub fn loss(&self, docs: &[Document]) -> Result<f64> {
        let targets = encode_targets(docs, &self.labels)?;
        let feats: Vec<SparseVector> = docs.iter().map(|d| featurize(d, self.config.feature_dim)).collect();
        Ok(self.loss_on(&feats, &targets))
    }

    fn loss_on(&self, feats: &[SparseVector], targets: &[usize]) -> f64 {
        let mut total = 0.0;
        let mut used = 0usize;
        for (x, &y) in feats.iter().zip(targets) {
            if x.is_empty() {
                continue;
            }
            let z = self.logits(x);
            let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let log_sum = z.iter().map(|v| (v - max).exp()).sum::<f64>().ln() + max;
            total += log_sum - z[y];
            used += 1;
        }
        let penalty = 0.5 * self.config.l2 * self.weights.iter().map(|w| w * w).sum::<f64>();
        total / used.max(1) as f64 + penalty
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let dim = self.config.feature_dim;
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            id: self.id.clone(),
            labels: self.labels.clone(),
            config: self.config.clone(),
            weights: self.weights.chunks(dim).map(<[f64]>::to_vec).collect(),
            bias: self.bias.clone(),
        };
        let json = serde_json::to_string(&file)?;
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: ModelFile = serde_json::from_str(&text)?;
        if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
            return Err(Error::Validation(format!(
                "{}: unsupported model format {} v{}",
                path.display(),
                file.format,
                file.version
            )));
        }
        file.config.validate()?;
        let k = file.labels.len();
        let dim = file.config.feature_dim;
        if file.weights.len() != k || file.weights.iter().any(|r| r.len() != dim) || file.bias.len() != k {
            return Err(Error::Validation(format!(
                "{}: weight shape does not match {k} classes × {dim} features",
                path.display()
            )));
        }
        let weights: Vec<f64> = file.weights.into_iter().flatten().collect();
        if weights.iter().chain(&file.bias).any(|w| !w.is_finite()) {
            return Err(Error::Validation(format!("{}: non-finite weights", path.display())));
        }
        Ok(Self { id: file.id, labels: file.labels, config: file.config, weights, bias: file.bias })
    }
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / sum).collect()
}

fn encode_targets(docs: &[Document], labels: &LabelSet) -> Result<Vec<usize>> {
    docs.iter()
        .map(|d| {
            let name =
                d.label().ok_or_else(|| Error::Validation(format!("document {} has no label", d.id())))?;
            labels
                .index_of(name)
                .ok_or_else(|| Error::Validation(format!("document {}: unknown label {name:?}", d.id())))
        })
        .collect()
}

/// Default member id for a toy model trained with `seed`.
pub fn toy_model_id(seed: u64) -> String {
    format!("toy-{seed}")
}

/// Trains a toy model. `resources` is required when the config asks for
/// training-time augmentation.
pub fn train_toy(
    docs: &[Document],
    labels: &LabelSet,
    cfg: &ToyModelConfig,
    resources: Option<&AugmentResources>,
) -> Result<ToyModel> {
    train_toy_with_history(docs, labels, cfg, resources).map(|(m, _)| m)
}

/// Like [`train_toy`], also returning the full-batch loss on the
/// un-augmented documents before training and after every epoch.
pub fn train_toy_with_history(
    docs: &[Document],
    labels: &LabelSet,
    cfg: &ToyModelConfig,
    resources: Option<&AugmentResources>,
) -> Result<(ToyModel, Vec<f64>)> {
    cfg.validate()?;
    let targets = encode_targets(docs, labels)?;
    let mut seen = vec![false; labels.len()];
    for &y in &targets {
        seen[y] = true;
    }
    if let Some(c) = seen.iter().position(|s| !s) {
        return Err(Error::EmptyClass(labels.names()[c].clone()));
    }
    let augmentation = match (&cfg.train_augment, resources) {
        (Some(aug), Some(res)) => Some((aug, res)),
        (Some(_), None) => {
            return Err(Error::Config("training-time augmentation needs augmentation resources".into()))
        }
        (None, _) => None,
    };

    let dim = cfg.feature_dim;
    let k = labels.len();
    let mut model = ToyModel {
        id: toy_model_id(cfg.seed),
        labels: labels.clone(),
        config: cfg.clone(),
        weights: vec![0.0; k * dim],
        bias: vec![0.0; k],
    };
    let clean: Vec<SparseVector> = docs.iter().map(|d| featurize(d, dim)).collect();
    let empty = clean.iter().filter(|x| x.is_empty()).count();
    if empty > 0 {
        log::warn!("skipping {empty} training documents without words");
    }
    let mut history = vec![model.loss_on(&clean, &targets)];

    let mut order: Vec<usize> = (0..docs.len()).collect();
    for epoch in 0..cfg.epochs {
        let feats: Vec<SparseVector> = match augmentation {
            None => clean.clone(),
            Some((aug, res)) => {
                let stream_seed = augment::derive_seed(aug.seed, "train", cfg.seed);
                docs.iter()
                    .map(|d| {
                        let mut rng = augment::substream(stream_seed, d.id(), epoch as u64);
                        let copy = augment::augment_document(d, d.id().to_owned(), aug, res, &mut rng);
                        featurize(&copy, dim)
                    })
                    .collect()
            }
        };
        let mut rng = augment::substream(cfg.seed, "shuffle", epoch as u64);
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            sgd_step(&mut model, &feats, &targets, batch);
        }
        history.push(model.loss_on(&clean, &targets));
    }
    Ok((model, history))
}

fn sgd_step(model: &mut ToyModel, feats: &[SparseVector], targets: &[usize], batch: &[usize]) {
    let batch: Vec<usize> = batch.iter().copied().filter(|&i| !feats[i].is_empty()).collect();
    if batch.is_empty() {
        return;
    }
    let cfg = &model.config;
    let (dim, lr) = (cfg.feature_dim, cfg.learning_rate);
    let scale = lr / batch.len() as f64;
    // Residuals are computed against the pre-step weights.
    let residuals: Vec<Vec<f64>> = batch
        .iter()
        .map(|&i| {
            let mut r = model.probabilities(&feats[i]);
            r[targets[i]] -= 1.0;
            r
        })
        .collect();
    if cfg.l2 > 0.0 {
        let decay = 1.0 - lr * cfg.l2;
        for w in &mut model.weights {
            *w *= decay;
        }
    }
    for (&i, r) in batch.iter().zip(&residuals) {
        for (c, &g) in r.iter().enumerate() {
            let row = &mut model.weights[c * dim..(c + 1) * dim];
            for &(j, x) in &feats[i] {
                row[j] -= scale * g * x;
            }
            model.bias[c] -= scale * g;
        }
    }
}

/// Class distribution of a document under a toy model.
pub fn predict_toy(model: &ToyModel, doc: &Document) -> ProbVector {
    let p = model.probabilities(&featurize(doc, model.config.feature_dim));
    normalize(&p).expect("softmax output is a valid distribution")
}

/// Predictions for one member read from a prediction file.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalPredictions {
    model_id: String,
    labels: LabelSet,
    by_sample: HashMap<String, ProbVector>,
}

impl ExternalPredictions {
    /// One predictor per model in the tensor.
    pub fn from_tensor(t: &PredictionTensor) -> Vec<Self> {
        (0..t.num_models())
            .map(|m| Self {
                model_id: t.model_ids()[m].clone(),
                labels: t.labels().clone(),
                by_sample: t.sample_ids().iter().cloned().zip(t.model_row(m).iter().cloned()).collect(),
            })
            .collect()
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }
}

/// An ensemble member.
#[derive(Debug, Clone)]
pub enum Predictor {
    Toy(ToyModel),
    External(ExternalPredictions),
}

impl Predictor {
    pub fn id(&self) -> &str {
        match self {
            Predictor::Toy(m) => m.id(),
            Predictor::External(e) => e.model_id(),
        }
    }

    pub fn labels(&self) -> &LabelSet {
        match self {
            Predictor::Toy(m) => m.labels(),
            Predictor::External(e) => &e.labels,
        }
    }

    /// Predictions for `docs`; external predictors fail with the ids they
    /// lack.
    pub fn predict(&self, docs: &[Document]) -> Result<Vec<ProbVector>> {
        match self {
            Predictor::Toy(m) => Ok(docs.par_iter().map(|d| predict_toy(m, d)).collect()),
            Predictor::External(e) => {
                let mut out = Vec::with_capacity(docs.len());
                let mut missing = Vec::new();
                for d in docs {
                    match e.by_sample.get(d.id()) {
                        Some(p) => out.push(p.clone()),
                        None => missing.push((e.model_id.clone(), d.id().to_owned())),
                    }
                }
                if missing.is_empty() {
                    Ok(out)
                } else {
                    Err(Error::Ragged { missing })
                }
            }
        }
    }
}

/// Scores every document with every predictor.
pub fn predict_corpus(models: &[Predictor], docs: &[Document]) -> Result<PredictionTensor> {
    let first = models.first().ok_or_else(|| Error::Empty("no predictors given".into()))?;
    if docs.is_empty() {
        return Err(Error::Empty("no documents to score".into()));
    }
    if let Some(m) = models.iter().find(|m| m.labels() != first.labels()) {
        return Err(Error::Validation(format!(
            "predictor {} uses a different label set than {}",
            m.id(),
            first.id()
        )));
    }
    let rows: Vec<Result<Vec<ProbVector>>> = models.par_iter().map(|m| m.predict(docs)).collect();
    let mut probs = Vec::with_capacity(models.len());
    let mut missing = Vec::new();
    for row in rows {
        match row {
            Ok(r) => probs.push(r),
            Err(Error::Ragged { missing: m }) => missing.extend(m),
            Err(e) => return Err(e),
        }
    }
    if !missing.is_empty() {
        return Err(Error::Ragged { missing });
    }
    PredictionTensor::new(
        probs,
        models.iter().map(|m| m.id().to_owned()).collect(),
        docs.iter().map(|d| d.id().to_owned()).collect(),
        first.labels().clone(),
    )
}
