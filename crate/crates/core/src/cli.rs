//! Command-line interface of the `uatta` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::augment::{fit_tfidf, tta_expand, AugmentResources, AugmentationConfig, TfidfModel};
use crate::backend::{predict_corpus, toy_model_id, train_toy, Predictor, ToyModel, ToyModelConfig};
use crate::error::{Error, Result};
use crate::ingest::{
    load_documents, load_keyboard_layout, load_lexicon, load_predictions, save_documents, save_predictions,
    DocFormat,
};
use crate::metrics::{encode_gold, evaluate, reliability_data, write_reliability_csv, DEFAULT_BINS};
use crate::pipeline::{cmd_pipeline, require_file};
use crate::synth;
use crate::types::{Document, LabelSet, PredictionTensor, DEFAULT_LABELS};
use crate::uq::{collapse_variants, ensemble, EnsembleOutput, LlfuMode, UqConfig, DEFAULT_FLOOR};

/// Environment variable naming a directory with `lexicon.tsv` and
/// `qwerty.tsv` that replace the bundled resources.
pub const RESOURCES_ENV: &str = "UATTA_RESOURCES";

const FORMATS_HELP: &str = "\
File formats:
  documents    JSONL, one {\"id\", \"title\", \"post\", \"label\"} object per line, or TSV
               with header `id<TAB>title<TAB>post<TAB>label` (chosen by the .tsv extension)
  predictions  JSONL, one {\"model_id\", \"sample_id\", \"probs\"} object per line
  models       JSON written by `train`
  tf-idf       JSON written by `fit-tfidf`";

const PIPELINE_HELP: &str = "\
Config format: one `key = value` per line, `#` starts a comment; relative paths
resolve against the config file's directory. Required keys: train, test,
output_dir. See resources/toy.conf for every key with its value.

Outputs, per member and for ua-ens / uatta-eb: <stem>.json (calibration report)
and <stem>_reliability.csv (header lo,hi,count,acc,conf,gap).

File formats:
  documents    JSONL, one {\"id\", \"title\", \"post\", \"label\"} object per line, or TSV
               with header `id<TAB>title<TAB>post<TAB>label` (chosen by the .tsv extension)";

#[derive(Debug, Parser)]
#[command(name = "uatta", version, about = "Uncertainty-aware test-time-augmented ensembling", after_help = FORMATS_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expand documents into augmented variants (`{id}#tta{i}`).
    #[command(after_help = FORMATS_HELP)]
    Augment(AugmentArgs),
    /// Fit a TF-IDF model on a corpus.
    #[command(name = "fit-tfidf", after_help = FORMATS_HELP)]
    FitTfidf(FitTfidfArgs),
    /// Train a toy classifier.
    #[command(after_help = FORMATS_HELP)]
    Train(TrainArgs),
    /// Score documents with trained models.
    #[command(after_help = FORMATS_HELP)]
    Predict(PredictArgs),
    /// Uncertainty-weighted ensemble of prediction files.
    #[command(after_help = FORMATS_HELP)]
    Ensemble(EnsembleArgs),
    /// Accuracy, macro-F1, ECE, MCE, Brier and a reliability table.
    #[command(after_help = FORMATS_HELP)]
    Evaluate(EvaluateArgs),
    /// Run the full experiment described by a config file.
    #[command(after_help = PIPELINE_HELP)]
    Pipeline(PipelineArgs),
    /// Write the bundled synthetic train/test corpus.
    #[command(name = "synth-corpus")]
    SynthCorpus(SynthArgs),
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    /// Comma-separated class names in index order.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_LABELS.map(String::from))]
    pub labels: Vec<String>,
}

impl LabelArgs {
    fn label_set(&self) -> Result<LabelSet> {
        LabelSet::new(self.labels.iter().cloned()).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Args)]
pub struct ResourceArgs {
    /// Synonym lexicon (TSV); defaults to the bundled one.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Keyboard adjacency (TSV); defaults to bundled QWERTY.
    #[arg(long)]
    pub keyboard: Option<PathBuf>,
}

impl ResourceArgs {
    /// Explicit path, else the file in `$UATTA_RESOURCES`, else bundled.
    fn resolve(explicit: &Option<PathBuf>, name: &str) -> Result<Option<PathBuf>> {
        if let Some(p) = explicit {
            require_file(p)?;
            return Ok(Some(p.clone()));
        }
        match std::env::var_os(RESOURCES_ENV) {
            Some(dir) => {
                let p = Path::new(&dir).join(name);
                Ok(p.is_file().then_some(p))
            }
            None => Ok(None),
        }
    }

    fn load(&self, tfidf: TfidfModel) -> Result<AugmentResources> {
        Ok(AugmentResources {
            lexicon: load_lexicon(Self::resolve(&self.lexicon, "lexicon.tsv")?.as_deref())?,
            layout: load_keyboard_layout(Self::resolve(&self.keyboard, "qwerty.tsv")?.as_deref())?,
            tfidf,
        })
    }
}

#[derive(Debug, Args)]
pub struct AugmentOptions {
    #[arg(long, default_value_t = 0.30)]
    pub synonym_rate: f64,
    #[arg(long, default_value_t = 0.05)]
    pub tfidf_rate: f64,
    #[arg(long, default_value_t = 0.05)]
    pub keyboard_rate: f64,
    #[arg(long, default_value_t = 4)]
    pub variants: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Leave the unmodified document out of the expansion.
    #[arg(long)]
    pub no_original: bool,
}

impl AugmentOptions {
    fn config(&self) -> AugmentationConfig {
        AugmentationConfig {
            synonym_rate: self.synonym_rate,
            tfidf_rate: self.tfidf_rate,
            keyboard_rate: self.keyboard_rate,
            variants: self.variants,
            seed: self.seed,
            include_original: !self.no_original,
        }
    }
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    /// Input documents.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output documents (format follows the extension).
    #[arg(long)]
    pub out: PathBuf,
    /// TF-IDF model from `fit-tfidf`; fitted on the input when absent.
    #[arg(long)]
    pub tfidf: Option<PathBuf>,
    #[command(flatten)]
    pub options: AugmentOptions,
    #[command(flatten)]
    pub resources: ResourceArgs,
    #[command(flatten)]
    pub labels: LabelArgs,
}

#[derive(Debug, Args)]
pub struct FitTfidfArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub labels: LabelArgs,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Labeled training documents.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Model file to write.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 4096)]
    pub feature_dim: usize,
    #[arg(long, default_value_t = 10)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub l2: f64,
    #[arg(long, default_value_t = 16)]
    pub batch_size: usize,
    /// Train on freshly augmented copies every epoch, using the default
    /// augmentation rates.
    #[arg(long)]
    pub train_augment: bool,
    #[command(flatten)]
    pub resources: ResourceArgs,
    #[command(flatten)]
    pub labels: LabelArgs,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model files; one ensemble member each.
    #[arg(long = "model", required = true, num_args = 1..)]
    pub models: Vec<PathBuf>,
    #[arg(long)]
    pub docs: PathBuf,
    /// Prediction JSONL to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    /// Prediction files; all members of all files are combined.
    #[arg(long, required = true, num_args = 1..)]
    pub preds: Vec<PathBuf>,
    /// Average `{id}#tta{i}` variants per member before ensembling.
    #[arg(long)]
    pub tta: bool,
    #[arg(long, default_value_t = DEFAULT_FLOOR)]
    pub var_floor: f64,
    #[arg(long, default_value_t = DEFAULT_FLOOR)]
    pub sigma_floor: f64,
    #[arg(long, default_value = "mean-over-classes")]
    pub mode: LlfuMode,
    /// Ensemble report JSON (final predictions, weights, uncertainties).
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the final predictions as prediction JSONL.
    #[arg(long)]
    pub preds_out: Option<PathBuf>,
    /// Model id used in `--preds-out`.
    #[arg(long, default_value = "ensemble")]
    pub id: String,
    #[command(flatten)]
    pub labels: LabelArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Prediction JSONL, or an ensemble report JSON from `ensemble`.
    #[arg(long)]
    pub preds: PathBuf,
    /// Labeled documents providing the gold classes.
    #[arg(long)]
    pub docs: PathBuf,
    /// Member to evaluate when the predictions hold several.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// Report JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Reliability CSV; defaults to `<out stem>_reliability.csv`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub labels: LabelArgs,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Run config (flat `key = value` file).
    #[arg(long)]
    pub config: PathBuf,
    /// Derive member and augmentation seeds from this run seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write reports here instead of the configured `output_dir`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Directory receiving `toy_train.jsonl` and `toy_test.jsonl`.
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn read_docs(path: &Path, labels: &LabelSet) -> Result<Vec<Document>> {
    require_file(path)?;
    load_documents(path, DocFormat::from_path(path), labels)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    require_file(path)?;
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn run_augment(args: &AugmentArgs) -> Result<()> {
    let labels = args.labels.label_set()?;
    let docs = read_docs(&args.input, &labels)?;
    let tfidf = match &args.tfidf {
        Some(p) => read_json(p)?,
        None => fit_tfidf(&docs)?,
    };
    let resources = args.resources.load(tfidf)?;
    let cfg = args.options.config();
    cfg.validate()?;
    let out: Vec<Document> = docs.iter().flat_map(|d| tta_expand(d, &cfg, &resources)).collect();
    save_documents(&out, &args.out, DocFormat::from_path(&args.out))
}

fn run_fit_tfidf(args: &FitTfidfArgs) -> Result<()> {
    let docs = read_docs(&args.input, &args.labels.label_set()?)?;
    write_json(&fit_tfidf(&docs)?, &args.out)
}

fn run_train(args: &TrainArgs) -> Result<()> {
    let labels = args.labels.label_set()?;
    let docs = read_docs(&args.input, &labels)?;
    let cfg = ToyModelConfig {
        feature_dim: args.feature_dim,
        epochs: args.epochs,
        learning_rate: args.learning_rate,
        l2: args.l2,
        batch_size: args.batch_size,
        seed: args.seed,
        train_augment: args.train_augment.then(AugmentationConfig::default),
    };
    let resources = match cfg.train_augment {
        Some(_) => Some(args.resources.load(fit_tfidf(&docs)?)?),
        None => None,
    };
    let model = train_toy(&docs, &labels, &cfg, resources.as_ref())?;
    log::info!("trained {}", toy_model_id(args.seed));
    model.save(&args.out)
}

fn run_predict(args: &PredictArgs) -> Result<()> {
    let models = args
        .models
        .iter()
        .map(|p| {
            require_file(p)?;
            ToyModel::load(p).map(Predictor::Toy)
        })
        .collect::<Result<Vec<_>>>()?;
    let docs = read_docs(&args.docs, models[0].labels())?;
    save_predictions(&predict_corpus(&models, &docs)?, &args.out)
}

/// Stacks the members of several prediction files over shared samples.
fn merge_tensors(parts: Vec<PredictionTensor>) -> Result<PredictionTensor> {
    let mut iter = parts.into_iter();
    let (mut probs, mut model_ids, sample_ids, labels) =
        iter.next().ok_or_else(|| Error::Empty("no prediction files".into()))?.into_parts();
    for t in iter {
        let by_id: std::collections::HashMap<&str, usize> =
            t.sample_ids().iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        if t.labels() != &labels {
            return Err(Error::Validation("prediction files use different label sets".into()));
        }
        let mut missing = Vec::new();
        for (j, id) in t.model_ids().iter().enumerate() {
            let mut row = Vec::with_capacity(sample_ids.len());
            for s in &sample_ids {
                match by_id.get(s.as_str()) {
                    Some(&n) => row.push(t.get(j, n).clone()),
                    None => missing.push((id.clone(), s.clone())),
                }
            }
            probs.push(row);
            model_ids.push(id.clone());
        }
        if !missing.is_empty() {
            return Err(Error::Ragged { missing });
        }
        if t.num_samples() != sample_ids.len() {
            return Err(Error::Validation("prediction files cover different samples".into()));
        }
    }
    PredictionTensor::new(probs, model_ids, sample_ids, labels)
}

fn run_ensemble(args: &EnsembleArgs) -> Result<()> {
    let labels = args.labels.label_set()?;
    let parts = args
        .preds
        .iter()
        .map(|p| {
            require_file(p)?;
            load_predictions(p, &labels)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut tensor = merge_tensors(parts)?;
    if args.tta {
        tensor = collapse_variants(&tensor)?;
    }
    let cfg = UqConfig { var_floor: args.var_floor, sigma_floor: args.sigma_floor, mode: args.mode };
    let out = ensemble(&tensor, &cfg)?;
    log::info!("ensembled {} members over {} samples", tensor.num_models(), tensor.num_samples());
    write_json(&out, &args.out)?;
    if let Some(p) = &args.preds_out {
        save_predictions(&out.as_tensor(&args.id), p)?;
    }
    Ok(())
}

fn run_evaluate(args: &EvaluateArgs) -> Result<()> {
    let labels = args.labels.label_set()?;
    require_file(&args.preds)?;
    let tensor = if args.preds.extension().is_some_and(|e| e == "json") {
        let out: EnsembleOutput = read_json(&args.preds)?;
        if out.labels != labels {
            return Err(Error::Config("ensemble report uses a different label set; pass --labels".into()));
        }
        out.as_tensor("ensemble")
    } else {
        load_predictions(&args.preds, &labels)?
    };
    let member = match (&args.model, tensor.num_models()) {
        (Some(id), _) => tensor
            .model_ids()
            .iter()
            .position(|m| m == id)
            .ok_or_else(|| Error::Config(format!("no member {id:?} in {}", args.preds.display())))?,
        (None, 1) => 0,
        (None, _) => {
            return Err(Error::Config(format!(
                "{} holds several members ({}); choose one with --model",
                args.preds.display(),
                tensor.model_ids().join(", ")
            )))
        }
    };

    let docs = read_docs(&args.docs, &labels)?;
    let by_id: std::collections::HashMap<&str, &Document> = docs.iter().map(|d| (d.id(), d)).collect();
    let aligned = tensor
        .sample_ids()
        .iter()
        .map(|s| {
            by_id.get(s.as_str()).map(|d| (*d).clone()).ok_or_else(|| {
                Error::Validation(format!("sample {s} has no document in {}", args.docs.display()))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let gold = encode_gold(&labels, &aligned)?;
    if args.bins == 0 {
        return Err(Error::Config("--bins must be at least 1".into()));
    }
    let report =
        evaluate(&tensor.model_ids()[member], tensor.model_row(member), &gold, labels.len(), args.bins)?;
    write_json(&report, &args.out)?;

    let csv = args.csv.clone().unwrap_or_else(|| {
        let stem = args.out.file_stem().unwrap_or_default().to_string_lossy();
        args.out.with_file_name(format!("{stem}_reliability.csv"))
    });
    let file = fs::File::create(&csv).map_err(|e| Error::io(&csv, e))?;
    write_reliability_csv(&reliability_data(&report.bins), std::io::BufWriter::new(file))
        .map_err(|e| Error::io(&csv, e))?;
    println!(
        "{}: n={} accuracy={:.4} macro_f1={:.4} ece={:.4} mce={:.4} brier={:.4}",
        report.model, report.n, report.accuracy, report.macro_f1, report.ece, report.mce, report.brier
    );
    Ok(())
}

fn run_pipeline(args: &PipelineArgs) -> Result<()> {
    let (reports, files) = cmd_pipeline(&args.config, args.seed, args.out_dir.as_deref())?;
    println!("{:<24} {:>8} {:>8} {:>8} {:>8} {:>8}", "model", "acc", "f1", "ece", "mce", "brier");
    for r in reports.all() {
        println!(
            "{:<24} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4}",
            r.model, r.accuracy, r.macro_f1, r.ece, r.mce, r.brier
        );
    }
    log::info!("wrote {} files", files.len());
    Ok(())
}

fn run_synth(args: &SynthArgs) -> Result<()> {
    fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    let (train, test) = synth::toy_corpus();
    save_documents(&train, &args.out_dir.join("toy_train.jsonl"), DocFormat::Jsonl)?;
    save_documents(&test, &args.out_dir.join("toy_test.jsonl"), DocFormat::Jsonl)
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Augment(a) => run_augment(a),
        Command::FitTfidf(a) => run_fit_tfidf(a),
        Command::Train(a) => run_train(a),
        Command::Predict(a) => run_predict(a),
        Command::Ensemble(a) => run_ensemble(a),
        Command::Evaluate(a) => run_evaluate(a),
        Command::Pipeline(a) => run_pipeline(a),
        Command::SynthCorpus(a) => run_synth(a),
    }
}

/// Parses arguments, runs the command and maps the outcome to an exit
/// code: 0 on success, 1 for computation errors, 2 for usage errors.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
