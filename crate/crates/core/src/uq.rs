//! Uncertainty-aware ensembling.
//!
//! For every sample the members' class distributions are summarised by a
//! per-class mean `μ` and population variance `σ²`. Each member's
//! uncertainty is a clipped Gaussian negative log-likelihood of its
//! prediction under that consensus,
//!
//! ```text
//! u_c = max(0, ½·ln(2π·v_c)) + (y_c − μ_c)² / (2·v_c),   v_c = max(σ²_c, floor)
//! ```
//!
//! averaged over classes (or taken at the consensus class only, see
//! [`LlfuMode`]). Members are then averaged with weights proportional to
//! `1 / max(σ_j, floor)`.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::augment::{self, AugmentResources, AugmentationConfig};
use crate::backend::{predict_corpus, Predictor};
use crate::error::{Error, Result};
use crate::types::{
    normalize, ConsensusStats, Document, LabelSet, PredictionTensor, ProbVector, UncertaintyMatrix,
};

pub const DEFAULT_FLOOR: f64 = 1e-6;

/// Ensemble outputs are rescaled only when their sum drifts further than
/// this from one.
const RENORMALIZE_ABOVE: f64 = 1e-12;

/// How per-class uncertainties reduce to one number per member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LlfuMode {
    /// Mean over all classes.
    #[default]
    MeanOverClasses,
    /// Only the class with the highest consensus probability.
    PredictedClass,
}

impl std::str::FromStr for LlfuMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean-over-classes" => Ok(LlfuMode::MeanOverClasses),
            "predicted-class" => Ok(LlfuMode::PredictedClass),
            other => Err(Error::Config(format!("unknown llfu mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UqConfig {
    /// Lower bound on the consensus variance.
    pub var_floor: f64,
    /// Lower bound on a member's uncertainty before inversion.
    pub sigma_floor: f64,
    pub mode: LlfuMode,
}

impl Default for UqConfig {
    fn default() -> Self {
        Self { var_floor: DEFAULT_FLOOR, sigma_floor: DEFAULT_FLOOR, mode: LlfuMode::MeanOverClasses }
    }
}

impl UqConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.var_floor > 0.0 && self.sigma_floor > 0.0) {
            return Err(Error::Config("uncertainty floors must be positive".into()));
        }
        Ok(())
    }
}

/// Per-class mean and population variance over the members.
pub fn consensus_stats(t: &PredictionTensor) -> ConsensusStats {
    let k = t.num_models() as f64;
    let classes = t.num_classes();
    let mut mu = Vec::with_capacity(t.num_samples());
    let mut var = Vec::with_capacity(t.num_samples());
    for n in 0..t.num_samples() {
        let column = t.sample_column(n);
        let m: Vec<f64> = (0..classes).map(|c| column.iter().map(|p| p[c]).sum::<f64>() / k).collect();
        let v: Vec<f64> =
            (0..classes).map(|c| column.iter().map(|p| (p[c] - m[c]).powi(2)).sum::<f64>() / k).collect();
        mu.push(m.into_iter().map(|x| x.clamp(0.0, 1.0)).collect());
        var.push(v);
    }
    ConsensusStats::new(mu, var).expect("means of distributions lie in [0, 1]")
}

/// Uncertainty term for a single class.
pub fn llfu_term(y: f64, mu: f64, var: f64, floor: f64) -> f64 {
    let v = var.max(floor);
    (0.5 * (2.0 * PI * v).ln()).max(0.0) + (y - mu).powi(2) / (2.0 * v)
}

/// Class-averaged uncertainty of one prediction against the consensus.
pub fn llfu(y: &ProbVector, mu: &[f64], var: &[f64], floor: f64) -> Result<f64> {
    if y.len() != mu.len() || y.len() != var.len() {
        return Err(Error::Validation(format!(
            "llfu inputs disagree on class count: {}, {}, {}",
            y.len(),
            mu.len(),
            var.len()
        )));
    }
    if floor.is_nan() || floor <= 0.0 {
        return Err(Error::Validation("variance floor must be positive".into()));
    }
    let sum: f64 = (0..y.len()).map(|c| llfu_term(y[c], mu[c], var[c], floor)).sum();
    Ok(sum / y.len() as f64)
}

fn member_uncertainty(y: &ProbVector, mu: &[f64], var: &[f64], cfg: &UqConfig) -> f64 {
    match cfg.mode {
        LlfuMode::MeanOverClasses => llfu(y, mu, var, cfg.var_floor).expect("shapes checked"),
        LlfuMode::PredictedClass => {
            let c = argmax(mu);
            llfu_term(y[c], mu[c], var[c], cfg.var_floor)
        }
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Normalized inverse-uncertainty weights for one sample.
pub fn uncertainty_weights(sigma: &[f64], floor: f64) -> Vec<f64> {
    let inv: Vec<f64> = sigma.iter().map(|&s| 1.0 / s.max(floor)).collect();
    let total: f64 = inv.iter().sum();
    inv.into_iter().map(|w| w / total).collect()
}

/// Ensemble prediction and every intermediate that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleOutput {
    pub labels: LabelSet,
    pub model_ids: Vec<String>,
    pub sample_ids: Vec<String>,
    #[serde(rename = "final")]
    pub final_probs: Vec<ProbVector>,
    /// `[model][sample]`, each column sums to one.
    pub weights: Vec<Vec<f64>>,
    pub uncertainty: UncertaintyMatrix,
    pub consensus: ConsensusStats,
}

impl EnsembleOutput {
    /// The final predictions as a one-member tensor.
    pub fn as_tensor(&self, model_id: &str) -> PredictionTensor {
        PredictionTensor::new(
            vec![self.final_probs.clone()],
            vec![model_id.to_owned()],
            self.sample_ids.clone(),
            self.labels.clone(),
        )
        .expect("ensemble output is well-formed")
    }
}

/// Uncertainty of every member on every sample.
pub fn uncertainty_matrix(t: &PredictionTensor, stats: &ConsensusStats, cfg: &UqConfig) -> UncertaintyMatrix {
    let sigma = (0..t.num_models())
        .map(|j| {
            (0..t.num_samples())
                .map(|n| member_uncertainty(t.get(j, n), &stats.mu()[n], &stats.var()[n], cfg))
                .collect()
        })
        .collect();
    UncertaintyMatrix::new(sigma).expect("llfu is non-negative")
}

/// Weighted average of members given their uncertainties.
pub fn combine(
    t: &PredictionTensor,
    uncertainty: UncertaintyMatrix,
    consensus: ConsensusStats,
    sigma_floor: f64,
) -> Result<EnsembleOutput> {
    let (k, n_samples) = (t.num_models(), t.num_samples());
    if uncertainty.sigma().len() != k || uncertainty.sigma().iter().any(|r| r.len() != n_samples) {
        return Err(Error::Validation("uncertainty matrix shape mismatch".into()));
    }
    let mut weights = vec![vec![0.0; n_samples]; k];
    let mut final_probs = Vec::with_capacity(n_samples);
    for n in 0..n_samples {
        let sigma: Vec<f64> = (0..k).map(|j| uncertainty.get(j, n)).collect();
        let w = uncertainty_weights(&sigma, sigma_floor);
        // p₀ + Σ w_j (p_j − p₀) equals Σ w_j p_j when Σ w_j = 1, and is
        // exact when all members agree.
        let anchor = t.get(0, n).as_slice();
        let mut mix = anchor.to_vec();
        for (j, (&wj, row)) in w.iter().zip(&mut weights).enumerate() {
            row[n] = wj;
            for ((m, &p), &a) in mix.iter_mut().zip(t.get(j, n).as_slice()).zip(anchor) {
                *m += wj * (p - a);
            }
        }
        for m in &mut mix {
            *m = m.clamp(0.0, 1.0);
        }
        let sum: f64 = mix.iter().sum();
        final_probs.push(if (sum - 1.0).abs() > RENORMALIZE_ABOVE {
            normalize(&mix)?
        } else {
            ProbVector::from_trusted(mix)
        });
    }
    Ok(EnsembleOutput {
        labels: t.labels().clone(),
        model_ids: t.model_ids().to_vec(),
        sample_ids: t.sample_ids().to_vec(),
        final_probs,
        weights,
        uncertainty,
        consensus,
    })
}

/// Uncertainty-weighted ensemble of all members in `t`.
pub fn ensemble(t: &PredictionTensor, cfg: &UqConfig) -> Result<EnsembleOutput> {
    cfg.validate()?;
    let consensus = consensus_stats(t);
    let uncertainty = uncertainty_matrix(t, &consensus, cfg);
    combine(t, uncertainty, consensus, cfg.sigma_floor)
}

/// Componentwise mean of the predictions for the variants of one input.
pub fn tta_aggregate(variant_preds: &[&ProbVector]) -> Result<ProbVector> {
    let first =
        variant_preds.first().ok_or_else(|| Error::Empty("no variant predictions to aggregate".into()))?;
    let k = first.len();
    if variant_preds.iter().any(|p| p.len() != k) {
        return Err(Error::Validation("variant predictions disagree on class count".into()));
    }
    let count = variant_preds.len() as f64;
    let mean: Vec<f64> = (0..k).map(|c| variant_preds.iter().map(|p| p[c]).sum::<f64>() / count).collect();
    normalize(&mean)
}

/// Collapses variant samples (`{id}#tta{i}` and the original `{id}`) into
/// one sample per source id, averaging each member's predictions. Source
/// ids keep their first-appearance order.
pub fn collapse_variants(t: &PredictionTensor) -> Result<PredictionTensor> {
    let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (n, id) in t.sample_ids().iter().enumerate() {
        let source = augment::source_id(id);
        let g = *index.entry(source).or_insert_with(|| {
            groups.push((source.to_owned(), Vec::new()));
            groups.len() - 1
        });
        groups[g].1.push(n);
    }
    let probs = (0..t.num_models())
        .map(|j| {
            groups
                .iter()
                .map(|(_, members)| {
                    let preds: Vec<&ProbVector> = members.iter().map(|&n| t.get(j, n)).collect();
                    tta_aggregate(&preds)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    PredictionTensor::new(
        probs,
        t.model_ids().to_vec(),
        groups.into_iter().map(|(id, _)| id).collect(),
        t.labels().clone(),
    )
}

/// Full pipeline: expand each document into variants, score every variant
/// with every member, average each member over the variants, then ensemble.
pub fn uatta_eb(
    models: &[Predictor],
    docs: &[Document],
    aug_cfg: &AugmentationConfig,
    resources: &AugmentResources,
    cfg: &UqConfig,
) -> Result<EnsembleOutput> {
    aug_cfg.validate()?;
    let variants: Vec<Document> =
        docs.iter().flat_map(|d| augment::tta_expand(d, aug_cfg, resources)).collect();
    let raw = predict_corpus(models, &variants)?;
    let collapsed = collapse_variants(&raw)?;
    ensemble(&collapsed, cfg)
}
