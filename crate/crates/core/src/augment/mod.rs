//! Seeded text augmentation and test-time expansion of documents.
//!
//! A variant applies synonym, TF-IDF and keyboard replacement in that order
//! to the title and then the body, all drawing from one random substream
//! derived from `(seed, document id, variant index)`.

pub mod ops;
pub mod tfidf;
pub mod tokenize;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use ops::{keyboard_augment, replacement_count, synonym_augment, tfidf_augment};
pub use tfidf::{fit_tfidf, TfidfModel};
pub use tokenize::{segments, tokenize, words, Token, TokenKind, TokenizedText};

use crate::error::{Error, Result};
use crate::ingest::{KeyboardLayout, Lexicon};
use crate::types::Document;

/// Random stream used by every operator.
pub type AugmentRng = ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AugmentationConfig {
    pub synonym_rate: f64,
    pub tfidf_rate: f64,
    pub keyboard_rate: f64,
    pub variants: usize,
    pub seed: u64,
    pub include_original: bool,
}

impl Default for AugmentationConfig {
    fn default() -> Self {
        Self {
            synonym_rate: 0.30,
            tfidf_rate: 0.05,
            keyboard_rate: 0.05,
            variants: 4,
            seed: 0,
            include_original: true,
        }
    }
}

impl AugmentationConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, rate) in [
            ("synonym_rate", self.synonym_rate),
            ("tfidf_rate", self.tfidf_rate),
            ("keyboard_rate", self.keyboard_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::Config(format!("{name} = {rate} is outside [0, 1]")));
            }
        }
        if self.variants == 0 {
            return Err(Error::Config("variants must be at least 1".into()));
        }
        Ok(())
    }

    /// All rates zero: variants reproduce the original text.
    pub fn is_identity(&self) -> bool {
        self.synonym_rate == 0.0 && self.tfidf_rate == 0.0 && self.keyboard_rate == 0.0
    }
}

/// Lexicon, TF-IDF model and keyboard layout used by the operators.
#[derive(Debug, Clone)]
pub struct AugmentResources {
    pub lexicon: Lexicon,
    pub tfidf: TfidfModel,
    pub layout: KeyboardLayout,
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a 64-bit hash.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// FNV-1a 64-bit hash of the lowercased `word`, without building the
/// lowercased string.
pub fn fnv1a64_lowercase(word: &str) -> u64 {
    let mut h = FNV_OFFSET;
    let mut buf = [0u8; 4];
    for c in word.chars().flat_map(char::to_lowercase) {
        for &b in c.encode_utf8(&mut buf).as_bytes() {
            h = (h ^ u64::from(b)).wrapping_mul(FNV_PRIME);
        }
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the substream for one `(seed, key, index)` triple: FNV-1a over
/// `seed` (little endian), the key bytes, a `0xff` separator and `index`
/// (little endian), finished with a SplitMix64 round.
pub fn derive_seed(seed: u64, key: &str, index: u64) -> u64 {
    let mut bytes = Vec::with_capacity(17 + key.len());
    bytes.extend_from_slice(&seed.to_le_bytes());
    bytes.extend_from_slice(key.as_bytes());
    bytes.push(0xff);
    bytes.extend_from_slice(&index.to_le_bytes());
    splitmix64(fnv1a64(&bytes))
}

pub fn substream(seed: u64, key: &str, index: u64) -> AugmentRng {
    AugmentRng::seed_from_u64(derive_seed(seed, key, index))
}

fn augment_text(
    text: &str,
    cfg: &AugmentationConfig,
    res: &AugmentResources,
    rng: &mut AugmentRng,
) -> String {
    if text.is_empty() {
        return String::new();
    }
    let mut t = tokenize(text);
    ops::synonym_in_place(&mut t, cfg.synonym_rate, &res.lexicon, rng);
    ops::tfidf_in_place(&mut t, cfg.tfidf_rate, &res.tfidf, rng);
    ops::keyboard_in_place(&mut t, cfg.keyboard_rate, &res.layout, rng);
    t.detokenize()
}

/// One augmented copy of `doc` under a new id.
pub fn augment_document(
    doc: &Document,
    id: String,
    cfg: &AugmentationConfig,
    res: &AugmentResources,
    rng: &mut AugmentRng,
) -> Document {
    let title = augment_text(doc.title(), cfg, res, rng);
    let body = augment_text(doc.body(), cfg, res, rng);
    doc.with_text(id, title, body)
}

/// Id given to the `index`-th augmented variant of a document.
pub fn variant_id(doc_id: &str, index: usize) -> String {
    format!("{doc_id}#tta{index}")
}

/// Strips a `#tta{i}` suffix, returning the source document id.
pub fn source_id(sample_id: &str) -> &str {
    match sample_id.rsplit_once("#tta") {
        Some((base, idx)) if !idx.is_empty() && idx.bytes().all(|b| b.is_ascii_digit()) => base,
        _ => sample_id,
    }
}

/// Test-time expansion: the original (when configured) followed by
/// `cfg.variants` augmented copies with ids `{id}#tta1 ..= {id}#tta{variants}`.
pub fn tta_expand(doc: &Document, cfg: &AugmentationConfig, res: &AugmentResources) -> Vec<Document> {
    let mut out = Vec::with_capacity(cfg.variants + usize::from(cfg.include_original));
    if cfg.include_original {
        out.push(doc.clone());
    }
    for i in 1..=cfg.variants {
        let mut rng = substream(cfg.seed, doc.id(), i as u64);
        out.push(augment_document(doc, variant_id(doc.id(), i), cfg, res, &mut rng));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resources() -> AugmentResources {
        let corpus = vec![
            Document::new("a", "Feeling low", "I feel sad and tired every day", None).unwrap(),
            Document::new("b", "Racing heart", "I am anxious and worried at night", None).unwrap(),
        ];
        AugmentResources {
            lexicon: Lexicon::bundled(),
            tfidf: fit_tfidf(&corpus).unwrap(),
            layout: KeyboardLayout::qwerty(),
        }
    }

    fn doc() -> Document {
        Document::new(
            "r1",
            "Cannot sleep",
            "I feel sad and tired, and I am worried about my job.",
            Some("Depression".into()),
        )
        .unwrap()
    }

    #[test]
    fn expand_counts_and_original_first() {
        let res = resources();
        let cfg = AugmentationConfig { seed: 3, ..Default::default() };
        let out = tta_expand(&doc(), &cfg, &res);
        assert_eq!(out.len(), 5);
        assert_eq!(out[0], doc());
        for (i, v) in out.iter().enumerate().skip(1) {
            assert_eq!(v.id(), format!("r1#tta{i}"));
            assert_eq!(v.label(), Some("Depression"));
            assert_eq!(source_id(v.id()), "r1");
        }
        let without = AugmentationConfig { include_original: false, ..cfg };
        assert_eq!(tta_expand(&doc(), &without, &res).len(), 4);
    }

    #[test]
    fn zero_rates_reproduce_text() {
        let res = resources();
        let cfg = AugmentationConfig {
            synonym_rate: 0.0,
            tfidf_rate: 0.0,
            keyboard_rate: 0.0,
            ..Default::default()
        };
        for v in tta_expand(&doc(), &cfg, &res) {
            assert_eq!(v.title(), doc().title());
            assert_eq!(v.body(), doc().body());
        }
    }

    #[test]
    fn deterministic_and_variants_differ() {
        let res = resources();
        let cfg = AugmentationConfig { seed: 99, ..Default::default() };
        let a = tta_expand(&doc(), &cfg, &res);
        let b = tta_expand(&doc(), &cfg, &res);
        assert_eq!(a, b);
        for i in 1..a.len() {
            for j in (i + 1)..a.len() {
                assert_ne!(a[i].body(), a[j].body(), "variants {i} and {j}");
            }
        }
    }

    #[test]
    fn seed_derivation_is_stable() {
        assert_eq!(fnv1a64(b""), FNV_OFFSET);
        assert_eq!(fnv1a64(b"a"), 0xaf63_dc4c_8601_ec8c);
        assert_ne!(derive_seed(1, "r1", 1), derive_seed(1, "r1", 2));
        assert_ne!(derive_seed(1, "r1", 1), derive_seed(2, "r1", 1));
        assert_eq!(derive_seed(1, "r1", 1), derive_seed(1, "r1", 1));
    }

    #[test]
    fn source_id_parsing() {
        assert_eq!(source_id("doc#tta3"), "doc");
        assert_eq!(source_id("doc"), "doc");
        assert_eq!(source_id("doc#ttax"), "doc#ttax");
        assert_eq!(source_id("a#tta1#tta2"), "a#tta1");
    }

    #[test]
    fn config_validation() {
        assert!(AugmentationConfig::default().validate().is_ok());
        let bad = AugmentationConfig { synonym_rate: 1.5, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = AugmentationConfig { variants: 0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
