//! Python bindings: documents travel as dicts with the JSONL keys
//! (`id`, `title`, `post`, `label`), probability vectors as lists of floats.

use std::path::PathBuf;

use pyo3::exceptions::{PyFileNotFoundError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use uatta_core::augment::{self, AugmentResources, AugmentationConfig};
use uatta_core::backend::{self, ToyModelConfig};
use uatta_core::ingest::{KeyboardLayout, Lexicon};
use uatta_core::metrics;
use uatta_core::types::DEFAULT_LABELS;
use uatta_core::uq::{self, LlfuMode, UqConfig, DEFAULT_FLOOR};
use uatta_core::{pipeline, Document, Error, LabelSet, PredictionTensor, ProbVector};

fn to_py(e: Error) -> PyErr {
    let mut root = &e;
    while let Error::Stage { source, .. } = root {
        root = source;
    }
    match root {
        Error::MissingInput(_) => PyFileNotFoundError::new_err(e.to_string()),
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn label_set(labels: Option<Vec<String>>) -> PyResult<LabelSet> {
    match labels {
        Some(names) => LabelSet::new(names),
        None => LabelSet::new(DEFAULT_LABELS),
    }
    .map_err(to_py)
}

fn prob(v: Vec<f64>) -> PyResult<ProbVector> {
    ProbVector::new(v).map_err(to_py)
}

fn probs(rows: Vec<Vec<f64>>) -> PyResult<Vec<ProbVector>> {
    rows.into_iter().map(prob).collect()
}

fn doc_from_py(obj: &Bound<'_, PyDict>) -> PyResult<Document> {
    let text = |key: &str| -> PyResult<Option<String>> {
        obj.get_item(key)?.filter(|v| !v.is_none()).map(|v| v.extract()).transpose()
    };
    let id = text("id")?.ok_or_else(|| PyValueError::new_err("document needs an `id`"))?;
    Document::new(id, text("title")?.unwrap_or_default(), text("post")?.unwrap_or_default(), text("label")?)
        .map_err(to_py)
}

type DocList<'py> = Vec<Bound<'py, PyDict>>;

fn docs_from_py(objs: Vec<Bound<'_, PyDict>>) -> PyResult<Vec<Document>> {
    objs.iter().map(doc_from_py).collect()
}

fn doc_to_py<'py>(py: Python<'py>, doc: &Document) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("id", doc.id())?;
    d.set_item("title", doc.title())?;
    d.set_item("post", doc.body())?;
    d.set_item("label", doc.label())?;
    Ok(d)
}

/// Metrics of one prediction set.
#[pyclass(name = "CalibrationReport", frozen, get_all)]
struct PyCalibrationReport {
    model: String,
    n: usize,
    accuracy: f64,
    macro_f1: f64,
    ece: f64,
    mce: f64,
    brier: f64,
    /// `(lo, hi, count, acc, conf)` per bin.
    bins: Vec<(f64, f64, usize, f64, f64)>,
}

impl From<metrics::CalibrationReport> for PyCalibrationReport {
    fn from(r: metrics::CalibrationReport) -> Self {
        Self {
            model: r.model,
            n: r.n,
            accuracy: r.accuracy,
            macro_f1: r.macro_f1,
            ece: r.ece,
            mce: r.mce,
            brier: r.brier,
            bins: r.bins.iter().map(|b| (b.lo, b.hi, b.count, b.acc, b.conf)).collect(),
        }
    }
}

#[pymethods]
impl PyCalibrationReport {
    fn __repr__(&self) -> String {
        format!(
            "CalibrationReport(model={:?}, n={}, accuracy={:.4}, macro_f1={:.4}, ece={:.4}, mce={:.4}, brier={:.4})",
            self.model, self.n, self.accuracy, self.macro_f1, self.ece, self.mce, self.brier
        )
    }
}

/// Ensemble prediction with its weights and per-member uncertainties,
/// all indexed `[model][sample]` except `final`, `mu` and `var`
/// (`[sample][class]`).
#[pyclass(name = "EnsembleResult", frozen, get_all)]
struct PyEnsembleResult {
    #[pyo3(name = "final")]
    final_probs: Vec<Vec<f64>>,
    weights: Vec<Vec<f64>>,
    uncertainty: Vec<Vec<f64>>,
    mu: Vec<Vec<f64>>,
    var: Vec<Vec<f64>>,
}

/// Per-class mean, per-class variance, per-member uncertainty and the
/// inverse-uncertainty weighted average over members.
///
/// `probs` is indexed `[model][sample][class]`.
#[pyfunction]
#[pyo3(signature = (probs, var_floor = DEFAULT_FLOOR, sigma_floor = DEFAULT_FLOOR, mode = "mean-over-classes"))]
fn ensemble(
    probs: Vec<Vec<Vec<f64>>>,
    var_floor: f64,
    sigma_floor: f64,
    mode: &str,
) -> PyResult<PyEnsembleResult> {
    let k = probs.first().and_then(|m| m.first()).map_or(0, Vec::len);
    let n = probs.first().map_or(0, Vec::len);
    let models = probs.len();
    let rows = probs.into_iter().map(self::probs).collect::<PyResult<Vec<_>>>()?;
    let labels = LabelSet::new((0..k).map(|c| format!("c{c}"))).map_err(to_py)?;
    let tensor = PredictionTensor::new(
        rows,
        (0..models).map(|j| format!("m{j}")).collect(),
        (0..n).map(|i| format!("s{i}")).collect(),
        labels,
    )
    .map_err(to_py)?;
    let mode: LlfuMode = mode.parse().map_err(to_py)?;
    let out = uq::ensemble(&tensor, &UqConfig { var_floor, sigma_floor, mode }).map_err(to_py)?;
    Ok(PyEnsembleResult {
        final_probs: out.final_probs.into_iter().map(ProbVector::into_inner).collect(),
        weights: out.weights,
        uncertainty: out.uncertainty.sigma().to_vec(),
        mu: out.consensus.mu().to_vec(),
        var: out.consensus.var().to_vec(),
    })
}

/// Class-averaged uncertainty of `y` against consensus `mu`, `var`.
#[pyfunction]
#[pyo3(signature = (y, mu, var, floor = DEFAULT_FLOOR))]
fn llfu(y: Vec<f64>, mu: Vec<f64>, var: Vec<f64>, floor: f64) -> PyResult<f64> {
    uq::llfu(&prob(y)?, &mu, &var, floor).map_err(to_py)
}

/// Normalized inverse-uncertainty weights.
#[pyfunction]
#[pyo3(signature = (sigma, floor = DEFAULT_FLOOR))]
fn uncertainty_weights(sigma: Vec<f64>, floor: f64) -> Vec<f64> {
    uq::uncertainty_weights(&sigma, floor)
}

/// Componentwise mean of variant predictions.
#[pyfunction]
fn tta_aggregate(variants: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    let preds = probs(variants)?;
    let refs: Vec<&ProbVector> = preds.iter().collect();
    Ok(uq::tta_aggregate(&refs).map_err(to_py)?.into_inner())
}

/// Accuracy, macro-F1, ECE, MCE, Brier and reliability bins for
/// predictions against gold class indices.
#[pyfunction]
#[pyo3(signature = (preds, gold, bins = metrics::DEFAULT_BINS, model = "model"))]
fn evaluate(
    preds: Vec<Vec<f64>>,
    gold: Vec<usize>,
    bins: usize,
    model: &str,
) -> PyResult<PyCalibrationReport> {
    let preds = probs(preds)?;
    let k = preds.first().map_or(0, ProbVector::len);
    Ok(metrics::evaluate(model, &preds, &gold, k, bins).map_err(to_py)?.into())
}

/// Lossless segmentation into `(text, kind)` pairs, kind being `word`,
/// `punctuation` or `whitespace`.
#[pyfunction]
fn tokenize(text: &str) -> Vec<(String, String)> {
    augment::tokenize(text)
        .tokens()
        .iter()
        .map(|t| (t.text.clone(), format!("{:?}", t.kind).to_lowercase()))
        .collect()
}

/// Test-time augmentation with the bundled lexicon and keyboard layout and
/// a TF-IDF model fitted on `corpus`.
#[pyclass(name = "Augmenter", frozen)]
struct PyAugmenter {
    config: AugmentationConfig,
    resources: AugmentResources,
}

#[pymethods]
impl PyAugmenter {
    #[new]
    #[pyo3(signature = (corpus, synonym_rate = 0.30, tfidf_rate = 0.05, keyboard_rate = 0.05, variants = 4, seed = 0, include_original = true))]
    fn new(
        corpus: Vec<Bound<'_, PyDict>>,
        synonym_rate: f64,
        tfidf_rate: f64,
        keyboard_rate: f64,
        variants: usize,
        seed: u64,
        include_original: bool,
    ) -> PyResult<Self> {
        let config =
            AugmentationConfig { synonym_rate, tfidf_rate, keyboard_rate, variants, seed, include_original };
        config.validate().map_err(to_py)?;
        let tfidf = augment::fit_tfidf(&docs_from_py(corpus)?).map_err(to_py)?;
        Ok(Self {
            config,
            resources: AugmentResources {
                lexicon: Lexicon::bundled(),
                layout: KeyboardLayout::qwerty(),
                tfidf,
            },
        })
    }

    /// The original (when configured) followed by `{id}#tta{i}` variants.
    fn expand<'py>(&self, py: Python<'py>, doc: &Bound<'py, PyDict>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        augment::tta_expand(&doc_from_py(doc)?, &self.config, &self.resources)
            .iter()
            .map(|d| doc_to_py(py, d))
            .collect()
    }
}

/// Hashed bag-of-words softmax classifier.
#[pyclass(name = "ToyModel", frozen)]
struct PyToyModel {
    inner: backend::ToyModel,
}

#[pymethods]
impl PyToyModel {
    #[staticmethod]
    #[pyo3(signature = (docs, labels = None, seed = 0, feature_dim = 4096, epochs = 10, learning_rate = 0.1, l2 = 1e-4, batch_size = 16))]
    #[allow(clippy::too_many_arguments)]
    fn train(
        docs: Vec<Bound<'_, PyDict>>,
        labels: Option<Vec<String>>,
        seed: u64,
        feature_dim: usize,
        epochs: usize,
        learning_rate: f64,
        l2: f64,
        batch_size: usize,
    ) -> PyResult<Self> {
        let cfg =
            ToyModelConfig { feature_dim, epochs, learning_rate, l2, batch_size, seed, train_augment: None };
        let inner =
            backend::train_toy(&docs_from_py(docs)?, &label_set(labels)?, &cfg, None).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: backend::ToyModel::load(&path).map_err(to_py)? })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path).map_err(to_py)
    }

    #[getter]
    fn id(&self) -> &str {
        self.inner.id()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().names().to_vec()
    }

    /// Class probabilities for each document.
    fn predict(&self, docs: Vec<Bound<'_, PyDict>>) -> PyResult<Vec<Vec<f64>>> {
        Ok(docs_from_py(docs)?.iter().map(|d| backend::predict_toy(&self.inner, d).into_inner()).collect())
    }

    /// Mean cross-entropy on labeled documents.
    fn loss(&self, docs: Vec<Bound<'_, PyDict>>) -> PyResult<f64> {
        self.inner.loss(&docs_from_py(docs)?).map_err(to_py)
    }
}

/// Runs the experiment described by a config file and writes its reports.
/// Returns the member reports followed by `ua-ens` and `uatta-eb`.
#[pyfunction]
#[pyo3(signature = (config, seed = None, out_dir = None))]
fn run_pipeline(
    py: Python<'_>,
    config: PathBuf,
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
) -> PyResult<Vec<PyCalibrationReport>> {
    let (reports, _) =
        py.detach(|| pipeline::cmd_pipeline(&config, seed, out_dir.as_deref())).map_err(to_py)?;
    Ok(reports.all().cloned().map(Into::into).collect())
}

/// The bundled synthetic `(train, test)` corpus.
#[pyfunction]
fn synth_corpus(py: Python<'_>) -> PyResult<(DocList<'_>, DocList<'_>)> {
    let (train, test) = uatta_core::synth::toy_corpus();
    let convert = |docs: &[Document]| docs.iter().map(|d| doc_to_py(py, d)).collect::<PyResult<Vec<_>>>();
    Ok((convert(&train)?, convert(&test)?))
}

#[pymodule]
fn uatta(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DEFAULT_LABELS", DEFAULT_LABELS.to_vec())?;
    m.add_class::<PyCalibrationReport>()?;
    m.add_class::<PyEnsembleResult>()?;
    m.add_class::<PyAugmenter>()?;
    m.add_class::<PyToyModel>()?;
    m.add_function(wrap_pyfunction!(ensemble, m)?)?;
    m.add_function(wrap_pyfunction!(llfu, m)?)?;
    m.add_function(wrap_pyfunction!(uncertainty_weights, m)?)?;
    m.add_function(wrap_pyfunction!(tta_aggregate, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(synth_corpus, m)?)?;
    Ok(())
}
