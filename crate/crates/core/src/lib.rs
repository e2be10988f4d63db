//! Uncertainty-aware, test-time-augmented ensembling of text classifiers.
//!
//! The crate covers the whole path from documents to calibrated ensemble
//! predictions:
//!
//! - [`augment`]: seeded synonym / TF-IDF / keyboard augmentation and
//!   test-time expansion of documents into variants;
//! - [`backend`]: a hashed bag-of-words softmax classifier and adapters for
//!   externally produced prediction files;
//! - [`uq`]: consensus statistics, per-model uncertainty, inverse-uncertainty
//!   weighted ensembling and variant aggregation;
//! - [`metrics`]: accuracy, macro-F1, ECE, MCE, Brier score and reliability
//!   tables;
//! - [`ingest`]: the file formats tying the stages together.

pub mod augment;
pub mod backend;
pub mod cli;
pub mod config;
pub mod error;
pub mod ingest;
pub mod metrics;
pub mod pipeline;
pub mod synth;
pub mod types;
pub mod uq;

pub use error::{Error, Result};
pub use types::{
    argmax_label, normalize, ConsensusStats, Document, LabelSet, PredictionTensor, ProbVector,
    UncertaintyMatrix,
};
