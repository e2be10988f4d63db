use std::path::{Path, PathBuf};

use uatta_core::backend::{predict_toy, train_toy, train_toy_with_history, ToyModelConfig};
use uatta_core::ingest::{load_documents, DocFormat};
use uatta_core::types::DEFAULT_LABELS;
use uatta_core::{Document, LabelSet};

fn resource(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("resources").join(name)
}

fn bundled() -> (Vec<Document>, Vec<Document>, LabelSet) {
    let labels = LabelSet::new(DEFAULT_LABELS).unwrap();
    let train = load_documents(&resource("toy_train.jsonl"), DocFormat::Jsonl, &labels).unwrap();
    let test = load_documents(&resource("toy_test.jsonl"), DocFormat::Jsonl, &labels).unwrap();
    (train, test, labels)
}

#[test]
fn bundled_corpus_matches_generator() {
    let (train, test, _) = bundled();
    let (gen_train, gen_test) = uatta_core::synth::toy_corpus();
    assert_eq!(train, gen_train);
    assert_eq!(test, gen_test);
}

#[test]
fn default_training_loss_does_not_increase() {
    let (train, _, labels) = bundled();
    let cfg = ToyModelConfig { seed: 3, ..ToyModelConfig::default() };
    let (_, history) = train_toy_with_history(&train, &labels, &cfg, None).unwrap();
    assert_eq!(history.len(), cfg.epochs + 1);
    for (epoch, pair) in history.windows(2).enumerate() {
        assert!(pair[1] <= pair[0] + 1e-6, "epoch {}: {} -> {}", epoch + 1, pair[0], pair[1]);
    }
    assert!(history.last().unwrap() < &history[0]);
}

#[test]
fn predictions_are_softmax_outputs() {
    let (train, test, labels) = bundled();
    let model = train_toy(&train, &labels, &ToyModelConfig::default(), None).unwrap();
    for doc in &test {
        let p = predict_toy(&model, doc);
        assert!(p.as_slice().iter().all(|&x| x > 0.0));
        assert!((p.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn distinct_seeds_give_distinct_models() {
    let (train, test, labels) = bundled();
    let a =
        train_toy(&train, &labels, &ToyModelConfig { seed: 1, ..ToyModelConfig::default() }, None).unwrap();
    let b =
        train_toy(&train, &labels, &ToyModelConfig { seed: 2, ..ToyModelConfig::default() }, None).unwrap();
    let differs = test.iter().any(|d| {
        let (pa, pb) = (predict_toy(&a, d), predict_toy(&b, d));
        pa.argmax() != pb.argmax()
            || pa.as_slice().iter().zip(pb.as_slice()).any(|(x, y)| (x - y).abs() > 1e-6)
    });
    assert!(differs);
}
