//! Run configuration for the one-shot pipeline.
//!
//! The file format is a flat list of `key = value` lines. `#` starts a
//! comment, blank lines are ignored, and every key may appear once. Lists
//! are comma-separated. Relative paths are resolved against the directory
//! holding the config file.
//!
//! | key | value |
//! |-----|-------|
//! | `labels` | class names, in index order |
//! | `train`, `test` | labeled document files (`.jsonl` or `.tsv`) |
//! | `output_dir` | directory receiving reports |
//! | `lexicon`, `keyboard` | optional resource overrides |
//! | `seeds` | toy-model seeds, one member per seed |
//! | `toy.feature_dim`, `toy.epochs`, `toy.learning_rate`, `toy.l2`, `toy.batch_size` | trainer settings |
//! | `toy.train_augment` | `true` to augment training documents with the `aug.*` rates |
//! | `aug.synonym_rate`, `aug.tfidf_rate`, `aug.keyboard_rate` | operator rates in `[0, 1]` |
//! | `aug.variants`, `aug.seed`, `aug.include_original` | test-time expansion |
//! | `uq.var_floor`, `uq.sigma_floor` | positive floors |
//! | `uq.mode` | `mean-over-classes` or `predicted-class` |
//! | `metrics.bins` | calibration bin count |

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::augment::{derive_seed, AugmentationConfig};
use crate::backend::ToyModelConfig;
use crate::error::{Error, Result};
use crate::metrics::DEFAULT_BINS;
use crate::types::LabelSet;
use crate::uq::UqConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub labels: LabelSet,
    pub train: PathBuf,
    pub test: PathBuf,
    pub output_dir: PathBuf,
    pub lexicon: Option<PathBuf>,
    pub keyboard: Option<PathBuf>,
    pub seeds: Vec<u64>,
    /// Trainer settings shared by all members; `seed` is overridden per
    /// member.
    pub toy: ToyModelConfig,
    pub train_augment: bool,
    pub augmentation: AugmentationConfig,
    pub uq: UqConfig,
    pub bins: usize,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingInput(path.to_owned()),
            _ => Error::io(path, e),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|e| match e {
            Error::Parse { line, message, .. } => {
                Error::Config(format!("{}:{line}: {message}", path.display()))
            }
            other => other,
        })
    }

    /// Parses config text; relative paths are joined onto `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut raw = RawConfig::parse(text)?;
        let path = |raw: &mut RawConfig, key: &str| -> Result<Option<PathBuf>> {
            Ok(raw.take(key).map(|(_, v)| base.join(v)))
        };
        let labels = match raw.take("labels") {
            Some((line, v)) => LabelSet::new(split_list(&v).map(str::to_owned))
                .map_err(|e| parse_err(line, e.to_string()))?,
            None => LabelSet::default(),
        };
        let train = path(&mut raw, "train")?.ok_or_else(|| Error::Config("missing key `train`".into()))?;
        let test = path(&mut raw, "test")?.ok_or_else(|| Error::Config("missing key `test`".into()))?;
        let output_dir =
            path(&mut raw, "output_dir")?.ok_or_else(|| Error::Config("missing key `output_dir`".into()))?;
        let lexicon = path(&mut raw, "lexicon")?;
        let keyboard = path(&mut raw, "keyboard")?;
        let seeds = match raw.take("seeds") {
            Some((line, v)) => split_list(&v)
                .map(|s| s.parse::<u64>().map_err(|e| parse_err(line, format!("seed {s:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?,
            None => vec![0],
        };

        let mut toy = ToyModelConfig::default();
        raw.set("toy.feature_dim", &mut toy.feature_dim)?;
        raw.set("toy.epochs", &mut toy.epochs)?;
        raw.set("toy.learning_rate", &mut toy.learning_rate)?;
        raw.set("toy.l2", &mut toy.l2)?;
        raw.set("toy.batch_size", &mut toy.batch_size)?;
        let mut train_augment = false;
        raw.set("toy.train_augment", &mut train_augment)?;

        let mut augmentation = AugmentationConfig::default();
        raw.set("aug.synonym_rate", &mut augmentation.synonym_rate)?;
        raw.set("aug.tfidf_rate", &mut augmentation.tfidf_rate)?;
        raw.set("aug.keyboard_rate", &mut augmentation.keyboard_rate)?;
        raw.set("aug.variants", &mut augmentation.variants)?;
        raw.set("aug.seed", &mut augmentation.seed)?;
        raw.set("aug.include_original", &mut augmentation.include_original)?;

        let mut uq = UqConfig::default();
        raw.set("uq.var_floor", &mut uq.var_floor)?;
        raw.set("uq.sigma_floor", &mut uq.sigma_floor)?;
        raw.set("uq.mode", &mut uq.mode)?;

        let mut bins = DEFAULT_BINS;
        raw.set("metrics.bins", &mut bins)?;

        if let Some((key, (line, _))) = raw.entries.iter().min_by_key(|(_, (line, _))| *line) {
            return Err(parse_err(*line, format!("unknown key `{key}`")));
        }

        let cfg = RunConfig {
            labels,
            train,
            test,
            output_dir,
            lexicon,
            keyboard,
            seeds,
            toy,
            train_augment,
            augmentation,
            uq,
            bins,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config("seed list is empty".into()));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("seed list has duplicates".into()));
        }
        if self.bins == 0 {
            return Err(Error::Config("metrics.bins must be at least 1".into()));
        }
        self.toy.validate()?;
        self.augmentation.validate()?;
        self.uq.validate()
    }

    /// Trainer config for the member trained with `seed`.
    pub fn member_config(&self, seed: u64) -> ToyModelConfig {
        ToyModelConfig {
            seed,
            train_augment: self.train_augment.then(|| self.augmentation.clone()),
            ..self.toy.clone()
        }
    }

    /// Replaces the member seeds and the augmentation seed with values
    /// derived from one run seed, keeping the member count.
    pub fn with_run_seed(mut self, seed: u64) -> Self {
        let k = self.seeds.len() as u64;
        self.seeds = (0..k).map(|j| derive_seed(seed, "member", j)).collect();
        self.augmentation.seed = derive_seed(seed, "augment", 0);
        self
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { path: String::new(), line, message: message.into() }
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// Key/value pairs with their line numbers.
struct RawConfig {
    entries: HashMap<String, (usize, String)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| parse_err(line_no, format!("expected `key = value`, found {content:?}")))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(parse_err(line_no, "empty key"));
            }
            if let Some((first, _)) = entries.insert(key.to_owned(), (line_no, value.trim().to_owned())) {
                return Err(parse_err(line_no, format!("key `{key}` already set on line {first}")));
            }
        }
        Ok(Self { entries })
    }

    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.remove(key)
    }

    fn set<T: FromStr>(&mut self, key: &str, slot: &mut T) -> Result<()>
    where
        T::Err: std::fmt::Display,
    {
        if let Some((line, v)) = self.take(key) {
            *slot = v.parse().map_err(|e| parse_err(line, format!("`{key}`: cannot parse {v:?}: {e}")))?;
        }
        Ok(())
    }
}
