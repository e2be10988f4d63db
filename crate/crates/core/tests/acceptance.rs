//! Acceptance suite. Runs every criterion in sequence (so wall-clock limits
//! are measured without other tests competing for the CPU), prints one
//! PASS/FAIL line per criterion and exits non-zero if any failed.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uatta_core::augment::{
    fit_tfidf, keyboard_augment, synonym_augment, tfidf_augment, tokenize, tta_expand, AugmentResources,
    AugmentationConfig, TfidfModel, TokenizedText,
};
use uatta_core::config::RunConfig;
use uatta_core::ingest::{load_predictions, save_predictions, KeyboardLayout, Lexicon};
use uatta_core::metrics::{accuracy, bin_predictions, brier, ece, macro_f1, mce};
use uatta_core::pipeline::{cmd_pipeline, run_pipeline};
use uatta_core::uq::{ensemble, llfu, llfu_term, LlfuMode, UqConfig};
use uatta_core::{Document, LabelSet, PredictionTensor, ProbVector};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn close(a: f64, b: f64, tol: f64, what: &str) -> Result<(), String> {
    check((a - b).abs() <= tol, || format!("{what}: got {a}, expected {b} (tol {tol:e})"))
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn pv(v: &[f64]) -> ProbVector {
    ProbVector::new(v.to_vec()).unwrap()
}

fn six_labels() -> LabelSet {
    LabelSet::new(uatta_core::types::DEFAULT_LABELS).unwrap()
}

fn random_prob<R: Rng>(rng: &mut R, k: usize) -> ProbVector {
    // Occasional zeros and near-one-hot vectors exercise the floors.
    let raw: Vec<f64> = (0..k)
        .map(|_| match rng.random_range(0..10) {
            0 => 0.0,
            1 => rng.random::<f64>() * 50.0,
            _ => rng.random::<f64>(),
        })
        .collect();
    let total: f64 = raw.iter().sum();
    if total == 0.0 {
        return ProbVector::uniform(k).unwrap();
    }
    uatta_core::normalize(&raw).unwrap()
}

fn random_tensor<R: Rng>(rng: &mut R, models: usize, samples: usize) -> PredictionTensor {
    let labels = six_labels();
    PredictionTensor::new(
        (0..models).map(|_| (0..samples).map(|_| random_prob(rng, labels.len())).collect()).collect(),
        (0..models).map(|j| format!("m{j}")).collect(),
        (0..samples).map(|n| format!("s{n}")).collect(),
        labels,
    )
    .unwrap()
}

// ---------------------------------------------------------------------------
// Metric oracles

fn metric_oracles() -> Outcome {
    let start = Instant::now();
    let tol = 1e-9;

    // One sample, confidence 0.7, wrong.
    let wrong = [pv(&[0.7, 0.06, 0.06, 0.06, 0.06, 0.06])];
    let bins = bin_predictions(&wrong, &[1], 10).map_err(|e| e.to_string())?;
    close(ece(&bins, 1).unwrap(), 0.7, tol, "single-sample ECE")?;
    close(mce(&bins).unwrap(), 0.7, tol, "single-sample MCE")?;

    // Two bins of four: confidence 0.85 with 3 correct (gap 0.1) and
    // confidence 0.55 with 1 correct (gap 0.3).
    let mut preds = Vec::new();
    let mut gold = Vec::new();
    for (top, correct) in [(0.85, 3), (0.55, 1)] {
        let rest = (1.0 - top) / 5.0;
        for i in 0..4 {
            preds.push(pv(&[top, rest, rest, rest, rest, rest]));
            gold.push(if i < correct { 0 } else { 1 });
        }
    }
    let bins = bin_predictions(&preds, &gold, 10).map_err(|e| e.to_string())?;
    let filled: Vec<_> = bins.iter().filter(|b| b.count > 0).collect();
    check(filled.len() == 2 && filled.iter().all(|b| b.count == 4), || {
        format!("expected two bins of four, got {filled:?}")
    })?;
    close(ece(&bins, 8).unwrap(), 0.2, tol, "two-bin ECE")?;
    close(mce(&bins).unwrap(), 0.3, tol, "two-bin MCE")?;

    // Brier.
    let uniform = [ProbVector::uniform(6).unwrap()];
    close(brier(&uniform, &[2]).unwrap(), 30.0 / 36.0, tol, "uniform Brier")?;
    close(brier(&uniform, &[2]).unwrap(), 0.8333, 1e-4, "uniform Brier (printed)")?;
    let half = [pv(&[0.5, 0.5, 0.0, 0.0, 0.0, 0.0])];
    close(brier(&half, &[0]).unwrap(), 0.5, tol, "half-mass Brier")?;

    // Macro-F1 on gold [A,A,B,B], predicted [A,B,B,B].
    let preds = [pv(&[1.0, 0.0]), pv(&[0.0, 1.0]), pv(&[0.0, 1.0]), pv(&[0.0, 1.0])];
    let f1 = macro_f1(&preds, &[0, 0, 1, 1], 2).unwrap();
    close(f1, (2.0 / 3.0 + 0.8) / 2.0, tol, "macro-F1")?;
    close(f1, 0.7333, 1e-4, "macro-F1 (printed)")?;
    close(accuracy(&preds, &[0, 0, 1, 1]).unwrap(), 0.75, tol, "accuracy")?;

    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("{elapsed:.2?}"))
}

// ---------------------------------------------------------------------------
// Ensemble against a direct transcription of the weighting and LLFU formulas

/// Written from the formulas alone: consensus mean and population variance
/// per class, LLFU per class with a variance floor, inverse-uncertainty
/// weights and the weighted average.
fn reference_ensemble(probs: &[Vec<Vec<f64>>], floor: f64, predicted_class: bool) -> Vec<Vec<f64>> {
    let k = probs.len();
    let n_samples = probs[0].len();
    let classes = probs[0][0].len();
    let mut out = Vec::new();
    for n in 0..n_samples {
        let mut mean = vec![0.0; classes];
        for model in probs {
            for c in 0..classes {
                mean[c] += model[n][c];
            }
        }
        for m in &mut mean {
            *m /= k as f64;
        }
        let mut var = vec![0.0; classes];
        for model in probs {
            for c in 0..classes {
                var[c] += (model[n][c] - mean[c]) * (model[n][c] - mean[c]);
            }
        }
        for v in &mut var {
            *v /= k as f64;
        }
        let top = (0..classes).fold(0, |best, c| if mean[c] > mean[best] { c } else { best });

        let mut inv = Vec::new();
        for model in probs {
            let term = |c: usize| {
                let v = if var[c] > floor { var[c] } else { floor };
                let log_part = 0.5 * (2.0 * PI * v).ln();
                let log_part = if log_part > 0.0 { log_part } else { 0.0 };
                let d = model[n][c] - mean[c];
                log_part + d * d / (2.0 * v)
            };
            let sigma = if predicted_class {
                term(top)
            } else {
                (0..classes).map(term).sum::<f64>() / classes as f64
            };
            inv.push(1.0 / if sigma > floor { sigma } else { floor });
        }
        let total: f64 = inv.iter().sum();
        let mut y = vec![0.0; classes];
        for (j, model) in probs.iter().enumerate() {
            for c in 0..classes {
                y[c] += inv[j] * model[n][c];
            }
        }
        out.push(y.into_iter().map(|v| v / total).collect());
    }
    out
}

fn brute_force_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut worst = 0.0f64;
    for case in 0..500 {
        let k = rng.random_range(1..=5);
        let n = rng.random_range(1..=20);
        let t = random_tensor(&mut rng, k, n);
        let predicted_class = case % 4 == 3;
        let cfg = UqConfig {
            mode: if predicted_class { LlfuMode::PredictedClass } else { LlfuMode::MeanOverClasses },
            ..UqConfig::default()
        };
        let got = ensemble(&t, &cfg).map_err(|e| e.to_string())?;
        let raw: Vec<Vec<Vec<f64>>> =
            (0..k).map(|j| t.model_row(j).iter().map(|p| p.as_slice().to_vec()).collect()).collect();
        let want = reference_ensemble(&raw, cfg.var_floor, predicted_class);
        for (g, w) in got.final_probs.iter().zip(&want) {
            for (a, b) in g.as_slice().iter().zip(w) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    check(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!("max deviation {worst:.1e}, {elapsed:.2?}"))
}

// ---------------------------------------------------------------------------
// Ensemble invariants

fn arb_tensor() -> impl Strategy<Value = PredictionTensor> {
    (1usize..=5, 1usize..=8, any::<u64>())
        .prop_map(|(k, n, seed)| random_tensor(&mut ChaCha8Rng::seed_from_u64(seed), k, n))
}

fn ensemble_invariants() -> Outcome {
    let cases = 1000;
    let cfg = UqConfig::default();
    let mut runner =
        TestRunner::new(PropConfig { cases, failure_persistence: None, ..PropConfig::default() });

    let mut results = Vec::new();

    results.push((
        "convex bounds",
        runner
            .run(&arb_tensor(), |t| {
                let out = ensemble(&t, &cfg).unwrap();
                for n in 0..t.num_samples() {
                    for c in 0..t.num_classes() {
                        let column = t.sample_column(n);
                        let lo = column.iter().map(|p| p[c]).fold(f64::INFINITY, f64::min);
                        let hi = column.iter().map(|p| p[c]).fold(f64::NEG_INFINITY, f64::max);
                        let y = out.final_probs[n][c];
                        prop_assert!(lo - 1e-12 <= y && y <= hi + 1e-12, "{lo} <= {y} <= {hi}");
                    }
                    let wsum: f64 = (0..t.num_models()).map(|j| out.weights[j][n]).sum();
                    prop_assert!((wsum - 1.0).abs() < 1e-9);
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    ));

    let permuted = (arb_tensor(), any::<u64>());
    results.push((
        "permutation invariance",
        runner
            .run(&permuted, |(t, seed)| {
                let mut order: Vec<usize> = (0..t.num_models()).collect();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for i in (1..order.len()).rev() {
                    order.swap(i, rng.random_range(0..=i));
                }
                let a = ensemble(&t, &cfg).unwrap();
                let b = ensemble(&t.permute_models(&order).unwrap(), &cfg).unwrap();
                for n in 0..t.num_samples() {
                    for (x, y) in a.final_probs[n].as_slice().iter().zip(b.final_probs[n].as_slice()) {
                        prop_assert!((x - y).abs() <= 1e-12, "{x} vs {y}");
                    }
                    for (new_j, &old_j) in order.iter().enumerate() {
                        let (ua, ub) = (a.uncertainty.get(old_j, n), b.uncertainty.get(new_j, n));
                        prop_assert!((ua - ub).abs() <= 1e-12 * ua.abs().max(1.0));
                        prop_assert!((a.weights[old_j][n] - b.weights[new_j][n]).abs() <= 1e-12);
                    }
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    ));

    let identical = (1usize..=5, 1usize..=8, any::<u64>());
    results.push((
        "identical members",
        runner
            .run(&identical, |(k, n, seed)| {
                let one = random_tensor(&mut ChaCha8Rng::seed_from_u64(seed), 1, n);
                let row = one.model_row(0).to_vec();
                let t = PredictionTensor::new(
                    vec![row.clone(); k],
                    (0..k).map(|j| format!("m{j}")).collect(),
                    one.sample_ids().to_vec(),
                    one.labels().clone(),
                )
                .unwrap();
                let out = ensemble(&t, &cfg).unwrap();
                prop_assert_eq!(&out.final_probs, &row);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    ));

    let single = (1usize..=8, any::<u64>());
    results.push((
        "k = 1",
        runner
            .run(&single, |(n, seed)| {
                let t = random_tensor(&mut ChaCha8Rng::seed_from_u64(seed), 1, n);
                let out = ensemble(&t, &cfg).unwrap();
                prop_assert_eq!(out.final_probs.as_slice(), t.model_row(0));
                Ok(())
            })
            .map_err(|e| e.to_string()),
    ));

    let failures: Vec<String> =
        results.iter().filter_map(|(name, r)| r.as_ref().err().map(|e| format!("{name}: {e}"))).collect();
    check(failures.is_empty(), || failures.join("; "))?;
    Ok(format!("4 properties x {cases} cases, 0 violations"))
}

// ---------------------------------------------------------------------------
// LLFU analytic points

fn llfu_points() -> Outcome {
    let v0 = 1.0 / (2.0 * PI);
    let y = pv(&[0.2, 0.3, 0.5]);
    let zero = llfu(&y, y.as_slice(), &[v0; 3], 1e-6).map_err(|e| e.to_string())?;
    check(zero == 0.0, || format!("y = mu at 1/(2pi) gave {zero}, expected exactly 0"))?;

    let single = llfu_term(0.7, 0.5, v0, 1e-6);
    close(single, 0.04 * PI, 1e-9, "0.04 pi case")?;
    close(single, 0.125664, 1e-6, "0.04 pi case (printed)")?;

    // Below 1/(2pi) the log term is negative and clipped; only the
    // quadratic term remains.
    for &v in &[1e-3, 0.01, 0.1, v0 * 0.999] {
        let d: f64 = 0.15;
        let got = llfu_term(0.5 + d, 0.5, v, 1e-6);
        close(got, d * d / (2.0 * v), 1e-12, &format!("clipped branch at var {v}"))?;
        check((0.5 * (2.0 * PI * v).ln()) < 0.0, || format!("var {v} should clip"))?;
    }
    // Above it, the log term contributes.
    let v = 0.5;
    close(llfu_term(0.5, 0.5, v, 1e-6), 0.5 * (2.0 * PI * v).ln(), 1e-12, "unclipped branch")?;
    Ok("zero point, 0.04 pi, clipping".into())
}

// ---------------------------------------------------------------------------
// Augmentation rate exactness and determinism

const WORDS: &[&str] = &[
    "happy", "sad", "anxious", "tired", "calm", "worried", "lonely", "focus", "trauma", "energy", "nervous",
    "empty", "panic", "manic", "deadline",
];

fn expected_count(rate: f64, eligible: usize) -> usize {
    ((rate * eligible as f64).round() as usize).max(1)
}

fn changed_tokens(a: &TokenizedText, b: &TokenizedText) -> usize {
    a.tokens().iter().zip(b.tokens()).filter(|(x, y)| x.text != y.text).count()
}

fn changed_chars(a: &TokenizedText, b: &TokenizedText) -> usize {
    a.detokenize().chars().zip(b.detokenize().chars()).filter(|(x, y)| x != y).count()
}

fn augmentation_exactness() -> Outcome {
    let lexicon = Lexicon::bundled();
    let layout = KeyboardLayout::qwerty();
    let corpus: Vec<Document> = (0..8)
        .map(|i| {
            let body: Vec<&str> = (0..40).map(|j| WORDS[(i * 7 + j * 3) % WORDS.len()]).collect();
            Document::new(format!("d{i}"), String::new(), body.join(" "), None).unwrap()
        })
        .collect();
    let tfidf: TfidfModel = fit_tfidf(&corpus).map_err(|e| e.to_string())?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut trials = 0usize;
    let mut failures = Vec::new();
    for trial in 0..1000u64 {
        let e = (trial % 200) as usize + 1;
        let rate = if trial % 2 == 0 { 0.30 } else { 0.05 };
        let want = expected_count(rate, e);

        // Synonyms: E lexicon words, each replaced by a different word.
        let text: Vec<&str> = (0..e).map(|_| WORDS[rng.random_range(0..WORDS.len())]).collect();
        let tokens = tokenize(&text.join(" "));
        let mut op_rng = ChaCha8Rng::seed_from_u64(trial);
        let got = changed_tokens(&tokens, &synonym_augment(&tokens, rate, &lexicon, &mut op_rng));
        if got != want {
            failures.push(format!("synonym E={e} rate={rate}: {got} != {want}"));
        }

        // TF-IDF: every word is eligible.
        let mut op_rng = ChaCha8Rng::seed_from_u64(trial);
        let got = changed_tokens(&tokens, &tfidf_augment(&tokens, rate, &tfidf, &mut op_rng));
        if got != want {
            failures.push(format!("tfidf E={e} rate={rate}: {got} != {want}"));
        }

        // Keyboard: E letters spread over words separated by digits, which
        // are not eligible.
        let mut letters = String::new();
        for i in 0..e {
            if i > 0 && i % 5 == 0 {
                letters.push_str("7 ");
            }
            letters.push(char::from(b'a' + rng.random_range(0..26u8)));
        }
        let tokens = tokenize(&letters);
        let mut op_rng = ChaCha8Rng::seed_from_u64(trial);
        let got = changed_chars(&tokens, &keyboard_augment(&tokens, rate, &layout, &mut op_rng));
        if got != want {
            failures.push(format!("keyboard E={e} rate={rate}: {got} != {want}"));
        }
        trials += 1;
    }
    check(failures.is_empty(), || format!("{} miscounts, first: {}", failures.len(), failures[0]))?;

    // Determinism of full test-time expansion.
    let resources = AugmentResources { lexicon, layout, tfidf };
    let cfg = AugmentationConfig { seed: 7, ..AugmentationConfig::default() };
    let (_, test) = uatta_core::synth::toy_corpus();
    let render = |docs: &[Document]| serde_json::to_vec(docs).unwrap();
    for doc in test.iter().take(20) {
        let a = render(&tta_expand(doc, &cfg, &resources));
        let b = render(&tta_expand(doc, &cfg, &resources));
        check(a == b, || format!("{}: expansion differs between calls", doc.id()))?;
    }
    Ok(format!("{trials} trials x 3 operators exact; expansion deterministic"))
}

// ---------------------------------------------------------------------------
// Desk-scale directional reproduction

fn toy_config_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("resources/toy.conf")
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

fn directional_reproduction() -> Outcome {
    let start = Instant::now();
    let base = RunConfig::load(&toy_config_path()).map_err(|e| e.to_string())?;
    check(base.seeds.len() == 4, || format!("toy config has {} member seeds", base.seeds.len()))?;

    let (mut min_ece, mut min_brier, mut mean_acc) = (vec![], vec![], vec![]);
    let (mut eb_ece, mut eb_brier, mut eb_acc, mut ua_ece) = (vec![], vec![], vec![], vec![]);
    for run_seed in 1..=5 {
        let reports = run_pipeline(&base.clone().with_run_seed(run_seed)).map_err(|e| e.to_string())?;
        let members = &reports.members;
        check(members.iter().all(|r| r.n == 120), || "expected 120 test documents".into())?;
        min_ece.push(members.iter().map(|r| r.ece).fold(f64::INFINITY, f64::min));
        min_brier.push(members.iter().map(|r| r.brier).fold(f64::INFINITY, f64::min));
        mean_acc.push(members.iter().map(|r| r.accuracy).sum::<f64>() / members.len() as f64);
        eb_ece.push(reports.uatta_eb.ece);
        eb_brier.push(reports.uatta_eb.brier);
        eb_acc.push(reports.uatta_eb.accuracy);
        ua_ece.push(reports.ua_ens.ece);
    }
    let elapsed = start.elapsed();
    let (min_ece, min_brier, mean_acc) = (median(min_ece), median(min_brier), median(mean_acc));
    let (eb_ece, eb_brier, eb_acc, ua_ece) =
        (median(eb_ece), median(eb_brier), median(eb_acc), median(ua_ece));
    let summary = format!(
        "ECE {eb_ece:.4} vs min member {min_ece:.4} / UA-ENS {ua_ece:.4}; \
         Brier {eb_brier:.4} vs {min_brier:.4}; acc {eb_acc:.4} vs mean {mean_acc:.4}; {elapsed:.1?}"
    );
    let mut failed = Vec::new();
    if eb_ece > min_ece {
        failed.push("ECE above best member");
    }
    if eb_brier > min_brier + 0.01 {
        failed.push("Brier above best member + 0.01");
    }
    if eb_acc < mean_acc - 0.02 {
        failed.push("accuracy below member mean - 0.02");
    }
    if eb_ece > ua_ece + 0.005 {
        failed.push("TTA degrades ECE");
    }
    if elapsed >= Duration::from_secs(60) {
        failed.push("runtime over 60 s");
    }
    if failed.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}: {summary}", failed.join(", ")))
    }
}

// ---------------------------------------------------------------------------
// Round-trip and pipeline determinism

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            (path.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&path).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn round_trip_and_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let (k, n) = (rng.random_range(1..=5), rng.random_range(1..=20));
        let t = random_tensor(&mut rng, k, n);
        let path = tmp.path().join(format!("preds{i}.jsonl"));
        save_predictions(&t, &path).map_err(|e| e.to_string())?;
        let back = load_predictions(&path, t.labels()).map_err(|e| e.to_string())?;
        check(back.model_ids() == t.model_ids() && back.sample_ids() == t.sample_ids(), || {
            "ids changed on round trip".into()
        })?;
        for j in 0..t.num_models() {
            for n in 0..t.num_samples() {
                for (a, b) in t.get(j, n).as_slice().iter().zip(back.get(j, n).as_slice()) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    check(worst <= 1e-12, || format!("round-trip deviation {worst:e}"))?;

    let config = toy_config_path();
    let (a, b) = (tmp.path().join("run-a"), tmp.path().join("run-b"));
    let (reports, written) = cmd_pipeline(&config, None, Some(&a)).map_err(|e| e.to_string())?;
    cmd_pipeline(&config, None, Some(&b)).map_err(|e| e.to_string())?;
    let json_reports = written.iter().filter(|p| p.extension().is_some_and(|x| x == "json")).count();
    check(json_reports == reports.members.len() + 2, || format!("{json_reports} json reports"))?;
    let (fa, fb) = (read_dir_sorted(&a), read_dir_sorted(&b));
    check(fa == fb, || "pipeline reports differ between runs".into())?;
    Ok(format!("round-trip deviation {worst:.1e}; {} files byte-identical", fa.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("metric oracles", metric_oracles),
        ("ensemble matches direct transcription", brute_force_equivalence),
        ("ensemble invariants", ensemble_invariants),
        ("llfu analytic points", llfu_points),
        ("augmentation rate exactness", augmentation_exactness),
        ("desk-scale directional reproduction", directional_reproduction),
        ("round trip and pipeline determinism", round_trip_and_determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
