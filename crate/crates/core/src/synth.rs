//! Deterministic generator for the bundled six-class toy corpus.
//!
//! Each class owns a pool of cue words taken from whole synonym groups of
//! the bundled lexicon, so synonym replacement keeps a document on-topic.
//! Documents mix own-class cues, cues borrowed from a confusable class,
//! shared clinical vocabulary and everyday filler; a small fraction carry a
//! flipped label. The result is learnable but noisy enough that a
//! long-trained linear model is overconfident on held-out text.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::types::{Document, DEFAULT_LABELS};

pub const TRAIN_SIZE: usize = 600;
pub const TEST_SIZE: usize = 120;
pub const TRAIN_SEED: u64 = 20_240_601;
pub const TEST_SEED: u64 = 20_240_602;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Probability that a document's label is replaced by another class.
    pub label_noise: f64,
    /// Probability that a document borrows cues from its confusable class.
    pub confusion: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self { label_noise: 0.06, confusion: 0.3 }
    }
}

const NONE_CUES: &[&str] = &[
    "happy",
    "glad",
    "joyful",
    "cheerful",
    "content",
    "pleased",
    "calm",
    "relaxed",
    "peaceful",
    "serene",
    "tranquil",
    "weekend",
    "saturday",
    "good",
    "fine",
    "decent",
    "nice",
    "great",
    "excellent",
    "superb",
    "wonderful",
    "terrific",
    "proud",
    "soothe",
    "unwound",
    "okay",
    "alright",
];

const DEPRESSION_CUES: &[&str] = &[
    "sad",
    "unhappy",
    "sorrowful",
    "miserable",
    "gloomy",
    "downcast",
    "hopeless",
    "despairing",
    "defeated",
    "empty",
    "hollow",
    "numb",
    "worthless",
    "useless",
    "pointless",
    "cry",
    "weep",
    "sob",
    "crying",
    "weeping",
    "sobbing",
    "lonely",
    "isolated",
    "alone",
    "solitary",
    "dark",
    "dim",
    "murky",
    "vacant",
    "blank",
    "solo",
];

const ANXIETY_CUES: &[&str] = &[
    "anxious",
    "nervous",
    "uneasy",
    "tense",
    "jittery",
    "worried",
    "concerned",
    "troubled",
    "worry",
    "fret",
    "panic",
    "alarm",
    "panicking",
    "freaking",
    "heart",
    "pulse",
    "racing",
    "pounding",
    "breath",
    "breathing",
    "bothered",
    "disturbed",
    "inhaling",
    "respiring",
    "upset",
    "distressed",
];

const BIPOLAR_CUES: &[&str] = &[
    "manic",
    "hyper",
    "wired",
    "energy",
    "vigor",
    "vitality",
    "euphoric",
    "elated",
    "ecstatic",
    "impulsive",
    "reckless",
    "rash",
    "spending",
    "splurging",
    "swing",
    "shift",
    "fluctuation",
    "swings",
    "shifts",
    "fluctuations",
    "stamina",
    "move",
    "relocate",
];

const ADHD_CUES: &[&str] = &[
    "focus",
    "concentrate",
    "focused",
    "attentive",
    "distracted",
    "unfocused",
    "scattered",
    "forgetful",
    "absentminded",
    "fidgety",
    "squirmy",
    "procrastinate",
    "delay",
    "postpone",
    "procrastinating",
    "delaying",
    "postponing",
    "deadline",
    "cutoff",
    "deadlines",
    "cutoffs",
];

const PTSD_CUES: &[&str] = &[
    "trauma",
    "injury",
    "wound",
    "traumatic",
    "harrowing",
    "distressing",
    "flashbacks",
    "recollections",
    "nightmare",
    "nightmares",
    "triggered",
    "provoked",
    "startle",
    "jump",
    "flinch",
    "war",
    "combat",
    "battle",
    "soldier",
    "veteran",
    "accident",
    "crash",
    "collision",
    "hypervigilant",
    "watchful",
    "guarded",
    "bad-dream",
    "bad-dreams",
    "struggle",
    "wrestle",
    "protected",
    "shielded",
    "defended",
    "safe",
    "secure",
];

/// Vocabulary that several classes use in roughly equal measure.
const SHARED: &[&str] = &[
    "tired",
    "exhausted",
    "weary",
    "drained",
    "sleepy",
    "restless",
    "agitated",
    "mood",
    "fear",
    "afraid",
    "scared",
    "medication",
    "meds",
    "pills",
    "doctor",
    "therapist",
    "therapy",
    "diagnosis",
    "diagnosed",
    "avoid",
    "avoiding",
    "memories",
];

const FILLER: &[&str] = &[
    "i",
    "i",
    "i",
    "my",
    "my",
    "me",
    "the",
    "the",
    "a",
    "and",
    "and",
    "to",
    "to",
    "of",
    "it",
    "is",
    "was",
    "have",
    "been",
    "feel",
    "feel",
    "feeling",
    "just",
    "really",
    "so",
    "but",
    "like",
    "about",
    "with",
    "all",
    "when",
    "can't",
    "don't",
    "anyone",
    "else",
    "how",
    "what",
    "know",
    "think",
    "get",
    "even",
    "still",
    "always",
    "never",
    "lately",
    "today",
    "yesterday",
    "morning",
    "night",
    "day",
    "week",
    "month",
    "year",
    "time",
    "home",
    "room",
    "bed",
    "job",
    "boss",
    "coworker",
    "school",
    "class",
    "friend",
    "friends",
    "family",
    "mom",
    "dad",
    "partner",
    "people",
    "work",
    "life",
    "help",
    "advice",
    "thing",
    "things",
    "something",
];

const TITLE_OPENERS: &[&str] = &[
    "need advice",
    "does anyone else",
    "is this normal",
    "rant",
    "update",
    "question",
    "long post",
    "first post",
    "help",
    "not sure",
];

fn cues(class: usize) -> &'static [&'static str] {
    [NONE_CUES, DEPRESSION_CUES, ANXIETY_CUES, BIPOLAR_CUES, ADHD_CUES, PTSD_CUES][class]
}

/// The class whose cues most often leak into documents of `class`.
fn confusable(class: usize) -> usize {
    [4, 3, 5, 1, 2, 2][class]
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Joins words into sentences of 5–11 words.
fn sentences<R: Rng>(words: &[&str], rng: &mut R) -> String {
    let mut out = String::new();
    let mut rest = words;
    while !rest.is_empty() {
        let len = rng.random_range(5..=11).min(rest.len());
        let (head, tail) = rest.split_at(len);
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&capitalize(head[0]));
        for w in &head[1..] {
            out.push(' ');
            out.push_str(w);
        }
        out.push(if rng.random_bool(0.15) { '?' } else { '.' });
        rest = tail;
    }
    out
}

fn generate_one<R: Rng>(id: String, class: usize, cfg: &SynthConfig, rng: &mut R) -> Document {
    let own = cues(class);
    let mut words: Vec<&str> = Vec::new();

    let strength = rng.random_range(2..=6);
    words.extend((0..strength).map(|_| *own.choose(rng).unwrap()));
    if rng.random_bool(cfg.confusion) {
        let other = cues(confusable(class));
        let borrowed = rng.random_range(1..=3);
        words.extend((0..borrowed).map(|_| *other.choose(rng).unwrap()));
    }
    if rng.random_bool(0.2) {
        let stray = cues(rng.random_range(0..DEFAULT_LABELS.len()));
        words.push(stray.choose(rng).unwrap());
    }
    let shared = rng.random_range(1..=4);
    words.extend((0..shared).map(|_| *SHARED.choose(rng).unwrap()));
    let filler = rng.random_range(10..=24);
    words.extend((0..filler).map(|_| *FILLER.choose(rng).unwrap()));

    // Fisher-Yates keeps the generator's draw sequence explicit.
    for i in (1..words.len()).rev() {
        let j = rng.random_range(0..=i);
        words.swap(i, j);
    }

    let title_words = rng.random_range(2..=4).min(words.len());
    let title =
        format!("{}: {}", capitalize(TITLE_OPENERS.choose(rng).unwrap()), words[..title_words].join(" "));
    let body = sentences(&words[title_words..], rng);

    let label = if rng.random_bool(cfg.label_noise) {
        let shift = rng.random_range(1..DEFAULT_LABELS.len());
        (class + shift) % DEFAULT_LABELS.len()
    } else {
        class
    };
    Document::new(id, title, body, Some(DEFAULT_LABELS[label].to_string()))
        .expect("generated documents have an id and text")
}

/// `n` documents with balanced underlying classes, ids `{prefix}-0001`, ….
pub fn generate_corpus(n: usize, seed: u64, prefix: &str, cfg: &SynthConfig) -> Vec<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let class = i % DEFAULT_LABELS.len();
            generate_one(format!("{prefix}-{:04}", i + 1), class, cfg, &mut rng)
        })
        .collect()
}

/// The bundled train and test splits.
pub fn toy_corpus() -> (Vec<Document>, Vec<Document>) {
    let cfg = SynthConfig::default();
    (
        generate_corpus(TRAIN_SIZE, TRAIN_SEED, "train", &cfg),
        generate_corpus(TEST_SIZE, TEST_SEED, "test", &cfg),
    )
}
