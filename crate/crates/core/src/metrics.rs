//! Classification and calibration metrics.
//!
//! Gold labels are passed as class indices; [`encode_gold`] maps names to
//! indices. Confidence is the largest class probability, and calibration
//! uses equal-width bins over `[0, 1]` where a confidence `c` falls in bin
//! `⌈c·m⌉` (clamped to `1..=m`).

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Document, LabelSet, ProbVector};

pub const DEFAULT_BINS: usize = 10;

/// Header of the reliability CSV.
pub const RELIABILITY_HEADER: &str = "lo,hi,count,acc,conf,gap";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// Fraction of correct predictions; 0 when empty.
    pub acc: f64,
    /// Mean confidence; 0 when empty.
    pub conf: f64,
}

impl Bin {
    pub fn gap(&self) -> f64 {
        (self.acc - self.conf).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub model: String,
    pub n: usize,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub ece: f64,
    pub mce: f64,
    pub brier: f64,
    pub bins: Vec<Bin>,
}

/// Class indices of the documents' labels.
pub fn encode_gold(labels: &LabelSet, docs: &[Document]) -> Result<Vec<usize>> {
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

fn check_lengths(preds: &[ProbVector], gold: &[usize]) -> Result<()> {
    if preds.len() != gold.len() {
        return Err(Error::Validation(format!("{} predictions for {} gold labels", preds.len(), gold.len())));
    }
    if preds.is_empty() {
        return Err(Error::Empty("no predictions to evaluate".into()));
    }
    if let Some((p, &g)) = preds.iter().zip(gold).find(|(p, &g)| g >= p.len()) {
        return Err(Error::Validation(format!("gold class {g} out of range for {} classes", p.len())));
    }
    Ok(())
}

pub fn accuracy(preds: &[ProbVector], gold: &[usize]) -> Result<f64> {
    check_lengths(preds, gold)?;
    let correct = preds.iter().zip(gold).filter(|(p, &g)| p.argmax() == g).count();
    Ok(correct as f64 / preds.len() as f64)
}

/// Unweighted mean of per-class F1 over all `num_classes` classes. A class
/// that is never predicted and never gold scores 0.
pub fn macro_f1(preds: &[ProbVector], gold: &[usize], num_classes: usize) -> Result<f64> {
    check_lengths(preds, gold)?;
    let mut tp = vec![0usize; num_classes];
    let mut predicted = vec![0usize; num_classes];
    let mut actual = vec![0usize; num_classes];
    for (p, &g) in preds.iter().zip(gold) {
        let y = p.argmax();
        predicted[y] += 1;
        actual[g] += 1;
        if y == g {
            tp[g] += 1;
        }
    }
    let total: f64 = (0..num_classes)
        .map(|c| {
            // 2PR/(P+R) simplifies to 2TP/(predicted + actual).
            let denom = predicted[c] + actual[c];
            if denom == 0 {
                0.0
            } else {
                2.0 * tp[c] as f64 / denom as f64
            }
        })
        .sum();
    Ok(total / num_classes as f64)
}

/// Zero-based bin of a confidence value.
fn bin_index(confidence: f64, m: usize) -> usize {
    let mut idx = ((confidence * m as f64).ceil() as usize).clamp(1, m);
    // Guard against `c·m` rounding up past an exact edge such as 0.3·10.
    if idx > 1 && confidence <= (idx - 1) as f64 / m as f64 {
        idx -= 1;
    }
    idx - 1
}

pub fn bin_predictions(preds: &[ProbVector], gold: &[usize], m: usize) -> Result<Vec<Bin>> {
    if m == 0 {
        return Err(Error::Validation("bin count must be at least 1".into()));
    }
    check_lengths(preds, gold)?;
    let mut counts = vec![0usize; m];
    let mut correct = vec![0usize; m];
    let mut conf_sum = vec![0.0; m];
    for (p, &g) in preds.iter().zip(gold) {
        let c = p.confidence();
        let b = bin_index(c, m);
        counts[b] += 1;
        conf_sum[b] += c;
        if p.argmax() == g {
            correct[b] += 1;
        }
    }
    Ok((0..m)
        .map(|b| {
            let count = counts[b];
            let (acc, conf) = if count == 0 {
                (0.0, 0.0)
            } else {
                (correct[b] as f64 / count as f64, conf_sum[b] / count as f64)
            };
            Bin { lo: b as f64 / m as f64, hi: (b + 1) as f64 / m as f64, count, acc, conf }
        })
        .collect())
}

/// Expected calibration error: bin gaps weighted by bin occupancy.
pub fn ece(bins: &[Bin], n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Empty("ECE over zero samples".into()));
    }
    let total: usize = bins.iter().map(|b| b.count).sum();
    if total != n {
        return Err(Error::Validation(format!("bins hold {total} samples, expected {n}")));
    }
    Ok(bins.iter().map(|b| b.count as f64 / n as f64 * b.gap()).sum())
}

/// Maximum calibration error over non-empty bins.
pub fn mce(bins: &[Bin]) -> Result<f64> {
    bins.iter()
        .filter(|b| b.count > 0)
        .map(Bin::gap)
        .reduce(f64::max)
        .ok_or_else(|| Error::Empty("MCE needs at least one non-empty bin".into()))
}

/// Multiclass Brier score: squared distance to the one-hot outcome summed
/// over classes, averaged over samples. Lies in `[0, 2]`.
pub fn brier(preds: &[ProbVector], gold: &[usize]) -> Result<f64> {
    check_lengths(preds, gold)?;
    let total: f64 = preds
        .iter()
        .zip(gold)
        .map(|(p, &g)| {
            p.as_slice()
                .iter()
                .enumerate()
                .map(|(c, &x)| {
                    let o = if c == g { 1.0 } else { 0.0 };
                    (x - o).powi(2)
                })
                .sum::<f64>()
        })
        .sum();
    Ok(total / preds.len() as f64)
}

/// One reliability-diagram row; `gap` is signed `acc − conf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityRow {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub acc: f64,
    pub conf: f64,
    pub gap: f64,
}

pub fn reliability_data(bins: &[Bin]) -> Vec<ReliabilityRow> {
    bins.iter()
        .map(|b| ReliabilityRow {
            lo: b.lo,
            hi: b.hi,
            count: b.count,
            acc: b.acc,
            conf: b.conf,
            gap: b.acc - b.conf,
        })
        .collect()
}

pub fn write_reliability_csv<W: Write>(rows: &[ReliabilityRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{RELIABILITY_HEADER}")?;
    for r in rows {
        writeln!(out, "{},{},{},{},{},{}", r.lo, r.hi, r.count, r.acc, r.conf, r.gap)?;
    }
    out.flush()
}

/// All metrics for one set of predictions.
pub fn evaluate(
    model: &str,
    preds: &[ProbVector],
    gold: &[usize],
    num_classes: usize,
    num_bins: usize,
) -> Result<CalibrationReport> {
    let bins = bin_predictions(preds, gold, num_bins)?;
    Ok(CalibrationReport {
        model: model.to_owned(),
        n: preds.len(),
        accuracy: accuracy(preds, gold)?,
        macro_f1: macro_f1(preds, gold, num_classes)?,
        ece: ece(&bins, preds.len())?,
        mce: mce(&bins)?,
        brier: brier(preds, gold)?,
        bins,
    })
}
