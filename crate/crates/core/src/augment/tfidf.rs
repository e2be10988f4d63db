//! Smoothed TF-IDF statistics over a document corpus.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::tokenize::{lowercase, words};
use crate::error::{Error, Result};
use crate::types::Document;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VocabEntry {
    pub token: String,
    /// Occurrences across the whole corpus.
    pub count: u64,
    /// Number of documents containing the token.
    pub df: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TfidfFile {
    format: String,
    version: u32,
    doc_count: u64,
    vocabulary: Vec<VocabEntry>,
}

const FORMAT: &str = "uatta-tfidf";
const VERSION: u32 = 1;

/// Fitted IDF table plus the corpus term frequencies used to draw
/// replacement words.
///
/// `idf(t) = ln((1 + N) / (1 + df(t))) + 1`, over lowercased word tokens of
/// title and body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TfidfFile", into = "TfidfFile")]
pub struct TfidfModel {
    doc_count: u64,
    vocabulary: Vec<VocabEntry>,
    index: HashMap<String, usize>,
    idf: Vec<f64>,
    /// Running sum of `count · idf` in vocabulary order.
    cumulative_mass: Vec<f64>,
}

impl TfidfModel {
    fn from_vocabulary(doc_count: u64, mut vocabulary: Vec<VocabEntry>) -> Result<Self> {
        if doc_count == 0 {
            return Err(Error::Validation("tf-idf model with zero documents".into()));
        }
        if vocabulary.is_empty() {
            return Err(Error::Validation("tf-idf vocabulary is empty".into()));
        }
        vocabulary.sort_by(|a, b| a.token.cmp(&b.token));
        let mut index = HashMap::with_capacity(vocabulary.len());
        let mut idf = Vec::with_capacity(vocabulary.len());
        let mut cumulative_mass = Vec::with_capacity(vocabulary.len());
        let mut running = 0.0;
        for (i, entry) in vocabulary.iter().enumerate() {
            if entry.df == 0 || entry.df > doc_count || entry.count < entry.df {
                return Err(Error::Validation(format!("inconsistent counts for token {:?}", entry.token)));
            }
            if index.insert(entry.token.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate token {:?}", entry.token)));
            }
            let w = smoothed_idf(doc_count, entry.df);
            idf.push(w);
            running += entry.count as f64 * w;
            cumulative_mass.push(running);
        }
        Ok(Self { doc_count, vocabulary, index, idf, cumulative_mass })
    }

    pub fn doc_count(&self) -> u64 {
        self.doc_count
    }

    /// Vocabulary sorted by token.
    pub fn vocabulary(&self) -> &[VocabEntry] {
        &self.vocabulary
    }

    /// IDF of a (case-insensitive) token; unseen tokens get `ln(1 + N) + 1`.
    pub fn idf(&self, token: &str) -> f64 {
        match self.index.get(lowercase(token).as_ref()) {
            Some(&i) => self.idf[i],
            None => smoothed_idf(self.doc_count, 0),
        }
    }

    pub(crate) fn vocab_index(&self, token_lower: &str) -> Option<usize> {
        self.index.get(token_lower).copied()
    }

    /// Corpus TF-IDF mass `count(t) · idf(t)` of vocabulary entry `i`.
    pub fn mass(&self, i: usize) -> f64 {
        self.vocabulary[i].count as f64 * self.idf[i]
    }

    pub fn total_mass(&self) -> f64 {
        *self.cumulative_mass.last().expect("vocabulary is non-empty")
    }

    /// Entry whose cumulative-mass interval contains `u`, for
    /// `u ∈ [0, total_mass)`.
    pub(crate) fn entry_at_mass(&self, u: f64) -> usize {
        self.cumulative_mass.partition_point(|&c| c <= u).min(self.vocabulary.len() - 1)
    }

    pub(crate) fn mass_before(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.cumulative_mass[i - 1]
        }
    }
}

impl TryFrom<TfidfFile> for TfidfModel {
    type Error = Error;

    fn try_from(file: TfidfFile) -> Result<Self> {
        if file.format != FORMAT || file.version != VERSION {
            return Err(Error::Validation(format!(
                "unsupported tf-idf file {} v{}",
                file.format, file.version
            )));
        }
        TfidfModel::from_vocabulary(file.doc_count, file.vocabulary)
    }
}

impl From<TfidfModel> for TfidfFile {
    fn from(model: TfidfModel) -> Self {
        TfidfFile {
            format: FORMAT.into(),
            version: VERSION,
            doc_count: model.doc_count,
            vocabulary: model.vocabulary,
        }
    }
}

fn smoothed_idf(doc_count: u64, df: u64) -> f64 {
    ((1.0 + doc_count as f64) / (1.0 + df as f64)).ln() + 1.0
}

/// Counts lowercased words of a document's title and body.
pub(crate) fn document_term_counts(doc: &Document) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for text in [doc.title(), doc.body()] {
        for word in words(text) {
            *counts.entry(word.to_lowercase()).or_insert(0) += 1;
        }
    }
    counts
}

/// Fits document frequencies and corpus term counts.
pub fn fit_tfidf(corpus: &[Document]) -> Result<TfidfModel> {
    if corpus.is_empty() {
        return Err(Error::Empty("tf-idf corpus has no documents".into()));
    }
    let mut stats: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for doc in corpus {
        for (token, count) in document_term_counts(doc) {
            let slot = stats.entry(token).or_insert((0, 0));
            slot.0 += count;
            slot.1 += 1;
        }
    }
    if stats.is_empty() {
        return Err(Error::Empty("tf-idf corpus has no word tokens".into()));
    }
    let vocabulary = stats.into_iter().map(|(token, (count, df))| VocabEntry { token, count, df }).collect();
    TfidfModel::from_vocabulary(corpus.len() as u64, vocabulary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, body: &str) -> Document {
        Document::new(id, "", body, None).unwrap()
    }

    fn toy() -> Vec<Document> {
        vec![doc("1", "shared alpha alpha"), doc("2", "shared beta"), doc("3", "Shared gamma")]
    }

    #[test]
    fn idf_values() {
        let m = fit_tfidf(&toy()).unwrap();
        assert!((m.idf("shared") - 1.0).abs() < 1e-15);
        assert!((m.idf("alpha") - ((4.0f64 / 2.0).ln() + 1.0)).abs() < 1e-15);
        assert!((m.idf("alpha") - 1.6931).abs() < 1e-4);
        assert!((m.idf("unseen") - (4.0f64.ln() + 1.0)).abs() < 1e-15);
        assert_eq!(m.idf("SHARED"), m.idf("shared"));
    }

    #[test]
    fn vocabulary_and_mass() {
        let m = fit_tfidf(&toy()).unwrap();
        let tokens: Vec<&str> = m.vocabulary().iter().map(|e| e.token.as_str()).collect();
        assert_eq!(tokens, ["alpha", "beta", "gamma", "shared"]);
        let alpha = &m.vocabulary()[0];
        assert_eq!((alpha.count, alpha.df), (2, 1));
        let total: f64 = (0..4).map(|i| m.mass(i)).sum();
        assert!((m.total_mass() - total).abs() < 1e-12);
        assert_eq!(m.entry_at_mass(0.0), 0);
        assert_eq!(m.entry_at_mass(m.total_mass() - 1e-9), 3);
    }

    #[test]
    fn empty_corpus_errors() {
        assert!(fit_tfidf(&[]).is_err());
        assert!(fit_tfidf(&[doc("1", "... !!")]).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let m = fit_tfidf(&toy()).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        let back: TfidfModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }
}
