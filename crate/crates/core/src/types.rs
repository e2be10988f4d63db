//! Domain types shared across the crate.
//!
//! Every type validates its invariants when it is built, so a value that
//! exists is a value that is well-formed. All of them are immutable after
//! construction.

use std::collections::HashSet;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `Σp = 1` accepted at ingestion.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Sums closer to one than this are treated as exact.
const RESCALE_ABOVE: f64 = 1e-12;

/// The six classes of the mental-health post classification task.
pub const DEFAULT_LABELS: [&str; 6] = ["None", "Depression", "Anxiety", "Bipolar", "ADHD", "PTSD"];

/// Ordered, distinct class names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct LabelSet {
    names: Vec<String>,
}

impl LabelSet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() < 2 {
            return Err(Error::Validation(format!(
                "a label set needs at least 2 classes, got {}",
                names.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if name.is_empty() {
                return Err(Error::Validation("empty class name".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::Validation(format!("duplicate class name {name:?}")));
            }
        }
        Ok(Self { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.names.get(index).map(String::as_str)
    }

    /// Exact, case-sensitive lookup.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

impl Default for LabelSet {
    fn default() -> Self {
        Self { names: DEFAULT_LABELS.iter().map(|s| s.to_string()).collect() }
    }
}

impl TryFrom<Vec<String>> for LabelSet {
    type Error = Error;

    fn try_from(names: Vec<String>) -> Result<Self> {
        LabelSet::new(names)
    }
}

impl From<LabelSet> for Vec<String> {
    fn from(labels: LabelSet) -> Self {
        labels.names
    }
}

/// A class distribution: non-negative components summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    /// Validates a distribution read from outside. Components must lie in
    /// `[0, 1]` and sum to one within [`SUM_TOLERANCE`]. Vectors whose sum is
    /// off by more than float rounding are rescaled; others are kept as
    /// given so that stored predictions load back bit-for-bit.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::Validation("empty probability vector".into()));
        }
        for (i, &x) in p.iter().enumerate() {
            if !x.is_finite() || !(0.0..=1.0 + SUM_TOLERANCE).contains(&x) {
                return Err(Error::Validation(format!("probability component {i} = {x} is outside [0, 1]")));
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::Validation(format!(
                "probabilities sum to {sum}, expected 1 within {SUM_TOLERANCE:e}"
            )));
        }
        if (sum - 1.0).abs() <= RESCALE_ABOVE {
            return Ok(Self(p.into_iter().map(|x| x.min(1.0)).collect()));
        }
        Ok(Self(p.into_iter().map(|x| (x / sum).min(1.0)).collect()))
    }

    /// Wraps a vector already known to be a distribution.
    pub(crate) fn from_trusted(p: Vec<f64>) -> Self {
        debug_assert!((p.iter().sum::<f64>() - 1.0).abs() <= SUM_TOLERANCE);
        Self(p)
    }

    /// One-hot distribution over `k` classes.
    pub fn one_hot(k: usize, index: usize) -> Result<Self> {
        if index >= k {
            return Err(Error::Validation(format!("index {index} out of range for {k} classes")));
        }
        let mut p = vec![0.0; k];
        p[index] = 1.0;
        Ok(Self(p))
    }

    /// Uniform distribution over `k` classes.
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Validation("empty probability vector".into()));
        }
        Ok(Self(vec![1.0 / k as f64; k]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Index of the largest component; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &x) in self.0.iter().enumerate().skip(1) {
            if x > self.0[best] {
                best = i;
            }
        }
        best
    }

    /// The largest component.
    pub fn confidence(&self) -> f64 {
        self.0[self.argmax()]
    }
}

impl TryFrom<Vec<f64>> for ProbVector {
    type Error = Error;

    fn try_from(p: Vec<f64>) -> Result<Self> {
        ProbVector::new(p)
    }
}

impl From<ProbVector> for Vec<f64> {
    fn from(p: ProbVector) -> Self {
        p.0
    }
}

impl Index<usize> for ProbVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Scales a non-negative vector to sum to one.
pub fn normalize(v: &[f64]) -> Result<ProbVector> {
    if v.is_empty() {
        return Err(Error::Validation("empty vector".into()));
    }
    for (i, &x) in v.iter().enumerate() {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::Validation(format!("component {i} = {x} must be finite and non-negative")));
        }
    }
    let sum: f64 = v.iter().sum();
    if sum <= 0.0 {
        return Err(Error::Degenerate);
    }
    Ok(ProbVector(v.iter().map(|&x| (x / sum).min(1.0)).collect()))
}

/// Name of the most probable class (lowest index on ties).
pub fn argmax_label<'a>(p: &ProbVector, labels: &'a LabelSet) -> Result<&'a str> {
    if p.len() != labels.len() {
        return Err(Error::Validation(format!(
            "probability vector has {} components but the label set has {} classes",
            p.len(),
            labels.len()
        )));
    }
    Ok(labels.names()[p.argmax()].as_str())
}

/// Predictions of `k` models on `N` samples over `K` classes.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionTensor {
    probs: Vec<Vec<ProbVector>>,
    model_ids: Vec<String>,
    sample_ids: Vec<String>,
    labels: LabelSet,
}

impl PredictionTensor {
    /// `probs` is indexed `[model][sample]`.
    pub fn new(
        probs: Vec<Vec<ProbVector>>,
        model_ids: Vec<String>,
        sample_ids: Vec<String>,
        labels: LabelSet,
    ) -> Result<Self> {
        if model_ids.is_empty() {
            return Err(Error::Validation("a prediction tensor needs at least one model".into()));
        }
        if sample_ids.is_empty() {
            return Err(Error::Validation("a prediction tensor needs at least one sample".into()));
        }
        if probs.len() != model_ids.len() {
            return Err(Error::Validation(format!(
                "{} model rows for {} model ids",
                probs.len(),
                model_ids.len()
            )));
        }
        check_unique(&model_ids, "model id")?;
        check_unique(&sample_ids, "sample id")?;
        let k = labels.len();
        for (row, model) in probs.iter().zip(&model_ids) {
            if row.len() != sample_ids.len() {
                return Err(Error::Validation(format!(
                    "model {model} has {} samples, expected {}",
                    row.len(),
                    sample_ids.len()
                )));
            }
            if let Some((n, p)) = row.iter().enumerate().find(|(_, p)| p.len() != k) {
                return Err(Error::Validation(format!(
                    "model {model}, sample {}: {} classes, expected {k}",
                    sample_ids[n],
                    p.len()
                )));
            }
        }
        Ok(Self { probs, model_ids, sample_ids, labels })
    }

    pub fn num_models(&self) -> usize {
        self.model_ids.len()
    }

    pub fn num_samples(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn num_classes(&self) -> usize {
        self.labels.len()
    }

    pub fn model_ids(&self) -> &[String] {
        &self.model_ids
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn get(&self, model: usize, sample: usize) -> &ProbVector {
        &self.probs[model][sample]
    }

    /// All samples for one model.
    pub fn model_row(&self, model: usize) -> &[ProbVector] {
        &self.probs[model]
    }

    /// The `k` model predictions for one sample.
    pub fn sample_column(&self, sample: usize) -> Vec<&ProbVector> {
        self.probs.iter().map(|row| &row[sample]).collect()
    }

    /// Single-model view, used for per-model evaluation.
    pub fn select_model(&self, model: usize) -> PredictionTensor {
        PredictionTensor {
            probs: vec![self.probs[model].clone()],
            model_ids: vec![self.model_ids[model].clone()],
            sample_ids: self.sample_ids.clone(),
            labels: self.labels.clone(),
        }
    }

    /// Reorders models; `order[i]` is the source index of the new model `i`.
    pub fn permute_models(&self, order: &[usize]) -> Result<PredictionTensor> {
        let mut seen = vec![false; self.num_models()];
        if order.len() != seen.len() {
            return Err(Error::Validation("permutation length mismatch".into()));
        }
        for &j in order {
            if j >= seen.len() || std::mem::replace(&mut seen[j], true) {
                return Err(Error::Validation("not a permutation".into()));
            }
        }
        Ok(PredictionTensor {
            probs: order.iter().map(|&j| self.probs[j].clone()).collect(),
            model_ids: order.iter().map(|&j| self.model_ids[j].clone()).collect(),
            sample_ids: self.sample_ids.clone(),
            labels: self.labels.clone(),
        })
    }

    pub fn into_parts(self) -> (Vec<Vec<ProbVector>>, Vec<String>, Vec<String>, LabelSet) {
        (self.probs, self.model_ids, self.sample_ids, self.labels)
    }
}

fn check_unique(ids: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::Validation(format!("duplicate {what} {id:?}")));
        }
    }
    Ok(())
}

/// Per-sample, per-class mean and population variance across models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsensusStats {
    mu: Vec<Vec<f64>>,
    var: Vec<Vec<f64>>,
}

impl ConsensusStats {
    pub fn new(mu: Vec<Vec<f64>>, var: Vec<Vec<f64>>) -> Result<Self> {
        if mu.len() != var.len() {
            return Err(Error::Validation("mu and var disagree on sample count".into()));
        }
        for (m, v) in mu.iter().zip(&var) {
            if m.len() != v.len() {
                return Err(Error::Validation("mu and var disagree on class count".into()));
            }
            if m.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return Err(Error::Validation("consensus mean outside [0, 1]".into()));
            }
            if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::Validation("negative or non-finite variance".into()));
            }
        }
        Ok(Self { mu, var })
    }

    pub fn mu(&self) -> &[Vec<f64>] {
        &self.mu
    }

    pub fn var(&self) -> &[Vec<f64>] {
        &self.var
    }
}

/// Per-model, per-sample uncertainty, indexed `[model][sample]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyMatrix {
    sigma: Vec<Vec<f64>>,
}

impl UncertaintyMatrix {
    pub fn new(sigma: Vec<Vec<f64>>) -> Result<Self> {
        if sigma.iter().flatten().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::Validation("uncertainty must be finite and non-negative".into()));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> &[Vec<f64>] {
        &self.sigma
    }

    pub fn get(&self, model: usize, sample: usize) -> f64 {
        self.sigma[model][sample]
    }
}

/// A titled text with an optional gold label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    id: String,
    title: String,
    body: String,
    label: Option<String>,
}

impl Document {
    pub fn new(
        id: impl Into<String>,
        title: impl Into<String>,
        body: impl Into<String>,
        label: Option<String>,
    ) -> Result<Self> {
        let (id, title, body) = (id.into(), title.into(), body.into());
        if id.is_empty() {
            return Err(Error::Validation("document id is empty".into()));
        }
        if title.is_empty() && body.is_empty() {
            return Err(Error::Validation(format!("document {id}: title and body are both empty")));
        }
        Ok(Self { id, title, body, label })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn body(&self) -> &str {
        &self.body
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Same label, new id and text.
    pub(crate) fn with_text(&self, id: String, title: String, body: String) -> Self {
        Self { id, title, body, label: self.label.clone() }
    }
}
