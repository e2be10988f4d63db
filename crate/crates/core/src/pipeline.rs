//! The end-to-end experiment: train members, ensemble with and without
//! test-time augmentation, and report calibration for every variant.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::augment::{fit_tfidf, AugmentResources};
use crate::backend::{predict_corpus, toy_model_id, train_toy, Predictor};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::ingest::{load_documents, load_keyboard_layout, load_lexicon, DocFormat};
use crate::metrics::{encode_gold, evaluate, reliability_data, write_reliability_csv, CalibrationReport};
use crate::types::Document;
use crate::uq::{ensemble, uatta_eb};

/// Report name of the ensemble without test-time augmentation.
pub const UA_ENS: &str = "ua-ens";
/// Report name of the full method.
pub const UATTA_EB: &str = "uatta-eb";

/// Reports of one pipeline run: each member, then [`UA_ENS`], then
/// [`UATTA_EB`].
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReports {
    pub members: Vec<CalibrationReport>,
    pub ua_ens: CalibrationReport,
    pub uatta_eb: CalibrationReport,
}

impl PipelineReports {
    pub fn all(&self) -> impl Iterator<Item = &CalibrationReport> {
        self.members.iter().chain([&self.ua_ens, &self.uatta_eb])
    }
}

/// Fails with [`Error::MissingInput`] unless `path` is an existing file.
pub fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::MissingInput(path.to_owned()))
    }
}

fn load_split(cfg: &RunConfig, path: &Path) -> Result<Vec<Document>> {
    require_file(path)?;
    load_documents(path, DocFormat::from_path(path), &cfg.labels)
}

/// Runs the experiment in memory.
pub fn run_pipeline(cfg: &RunConfig) -> Result<PipelineReports> {
    cfg.validate()?;
    let train = load_split(cfg, &cfg.train).map_err(|e| e.in_stage("load"))?;
    let test = load_split(cfg, &cfg.test).map_err(|e| e.in_stage("load"))?;
    let gold = encode_gold(&cfg.labels, &test).map_err(|e| e.in_stage("load"))?;

    let resources = (|| -> Result<AugmentResources> {
        if let Some(p) = &cfg.lexicon {
            require_file(p)?;
        }
        if let Some(p) = &cfg.keyboard {
            require_file(p)?;
        }
        Ok(AugmentResources {
            lexicon: load_lexicon(cfg.lexicon.as_deref())?,
            layout: load_keyboard_layout(cfg.keyboard.as_deref())?,
            tfidf: fit_tfidf(&train)?,
        })
    })()
    .map_err(|e| e.in_stage("resources"))?;

    let members: Vec<Predictor> = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            log::info!("training {}", toy_model_id(seed));
            train_toy(&train, &cfg.labels, &cfg.member_config(seed), Some(&resources)).map(Predictor::Toy)
        })
        .collect::<Result<_>>()
        .map_err(|e| e.in_stage("train"))?;

    let k = cfg.labels.len();
    let report = |name: &str, preds: &[crate::types::ProbVector]| evaluate(name, preds, &gold, k, cfg.bins);

    let single = predict_corpus(&members, &test).map_err(|e| e.in_stage("predict"))?;
    let member_reports = (0..single.num_models())
        .map(|j| report(&single.model_ids()[j], single.model_row(j)))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.in_stage("evaluate"))?;

    let plain = ensemble(&single, &cfg.uq).map_err(|e| e.in_stage("ensemble"))?;
    log::info!("scoring {} test documents with test-time augmentation", test.len());
    let tta = uatta_eb(&members, &test, &cfg.augmentation, &resources, &cfg.uq)
        .map_err(|e| e.in_stage("uatta-eb"))?;

    Ok(PipelineReports {
        members: member_reports,
        ua_ens: report(UA_ENS, &plain.final_probs).map_err(|e| e.in_stage("evaluate"))?,
        uatta_eb: report(UATTA_EB, &tta.final_probs).map_err(|e| e.in_stage("evaluate"))?,
    })
}

/// File stem of a report; member ids are prefixed with `model_`.
fn report_stem(name: &str, is_member: bool) -> String {
    let safe: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect();
    if is_member {
        format!("model_{safe}")
    } else {
        safe.replace('-', "_")
    }
}

/// Writes `<stem>.json` and `<stem>_reliability.csv` for every report and
/// returns the written paths. On failure everything written so far is
/// removed.
pub fn write_reports(reports: &PipelineReports, dir: &Path) -> Result<Vec<PathBuf>> {
    let created_dir = !dir.exists();
    let mut written = Vec::new();
    let result = (|| -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let n_members = reports.members.len();
        for (i, r) in reports.all().enumerate() {
            let stem = report_stem(&r.model, i < n_members);
            let json_path = dir.join(format!("{stem}.json"));
            let mut json = serde_json::to_string_pretty(r)?;
            json.push('\n');
            written.push(json_path.clone());
            fs::write(&json_path, json).map_err(|e| Error::io(&json_path, e))?;

            let csv_path = dir.join(format!("{stem}_reliability.csv"));
            let mut csv = Vec::new();
            write_reliability_csv(&reliability_data(&r.bins), &mut csv)
                .map_err(|e| Error::io(&csv_path, e))?;
            written.push(csv_path.clone());
            fs::write(&csv_path, csv).map_err(|e| Error::io(&csv_path, e))?;
        }
        Ok(())
    })();
    match result {
        Ok(()) => Ok(written),
        Err(e) => {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            if created_dir {
                let _ = fs::remove_dir_all(dir);
            }
            Err(e.in_stage("write"))
        }
    }
}

/// Loads a config, runs the experiment and writes its reports.
/// `run_seed` and `output_dir` override the corresponding config entries.
pub fn cmd_pipeline(
    config_path: &Path,
    run_seed: Option<u64>,
    output_dir: Option<&Path>,
) -> Result<(PipelineReports, Vec<PathBuf>)> {
    let mut cfg = RunConfig::load(config_path).map_err(|e| e.in_stage("config"))?;
    if let Some(seed) = run_seed {
        cfg = cfg.with_run_seed(seed);
    }
    if let Some(dir) = output_dir {
        cfg.output_dir = dir.to_owned();
    }
    let reports = run_pipeline(&cfg)?;
    let files = write_reports(&reports, &cfg.output_dir)?;
    Ok((reports, files))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_stems() {
        assert_eq!(report_stem("toy-3", true), "model_toy-3");
        assert_eq!(report_stem("a/b c", true), "model_a_b_c");
        assert_eq!(report_stem(UA_ENS, false), "ua_ens");
        assert_eq!(report_stem(UATTA_EB, false), "uatta_eb");
    }

    #[test]
    fn missing_inputs_are_usage_errors() {
        let dir = tempfile::tempdir().unwrap();
        let conf = dir.path().join("run.conf");
        fs::write(&conf, "train = nope.jsonl\ntest = nope.jsonl\noutput_dir = out\n").unwrap();
        let err = cmd_pipeline(&conf, None, None).unwrap_err();
        assert!(err.is_usage());
        assert!(err.to_string().contains("nope.jsonl"), "{err}");
        assert!(!dir.path().join("out").exists());
        assert!(cmd_pipeline(&dir.path().join("absent.conf"), None, None).unwrap_err().is_usage());
    }
}
