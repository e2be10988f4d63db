//! The three text operators. Each alters exactly
//! `max(1, round(rate · eligible))` units when `rate > 0` and something is
//! eligible, and nothing otherwise.

use rand::seq::index;
use rand::Rng;

use super::tfidf::TfidfModel;
use super::tokenize::{TokenKind, TokenizedText};
use crate::ingest::{KeyboardLayout, Lexicon};

const SCORE_EPSILON: f64 = 1e-9;

/// Number of units an operator alters for a given rate.
pub fn replacement_count(rate: f64, eligible: usize) -> usize {
    if rate <= 0.0 || eligible == 0 {
        return 0;
    }
    ((rate * eligible as f64).round() as usize).clamp(1, eligible)
}

/// Uppercases the first letter of `replacement` when `original` starts with
/// an uppercase letter.
fn match_initial_case(original: &str, replacement: &str) -> String {
    let starts_upper = original.chars().next().is_some_and(char::is_uppercase);
    if !starts_upper {
        return replacement.to_owned();
    }
    let mut chars = replacement.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn uniform_targets<R: Rng + ?Sized>(rng: &mut R, eligible: usize, count: usize) -> Vec<usize> {
    let mut picked = index::sample(rng, eligible, count).into_vec();
    picked.sort_unstable();
    picked
}

/// Replaces lexicon words with a uniformly drawn synonym.
pub fn synonym_augment<R: Rng + ?Sized>(
    text: &TokenizedText,
    rate: f64,
    lexicon: &Lexicon,
    rng: &mut R,
) -> TokenizedText {
    let mut out = text.clone();
    synonym_in_place(&mut out, rate, lexicon, rng);
    out
}

pub(crate) fn synonym_in_place<R: Rng + ?Sized>(
    text: &mut TokenizedText,
    rate: f64,
    lexicon: &Lexicon,
    rng: &mut R,
) {
    let eligible: Vec<usize> =
        text.word_positions().into_iter().filter(|&i| lexicon.contains(&text.tokens()[i].text)).collect();
    let count = replacement_count(rate, eligible.len());
    for slot in uniform_targets(rng, eligible.len(), count) {
        let pos = eligible[slot];
        let original = &text.tokens()[pos].text;
        let choices = lexicon.synonyms(original).expect("eligible words have entries");
        let pick = &choices[rng.random_range(0..choices.len())];
        let replacement = match_initial_case(original, pick);
        text.replace_text(pos, replacement);
    }
}

/// Replaces low-information words (by TF-IDF within this text) with
/// vocabulary words drawn in proportion to their corpus TF-IDF mass.
pub fn tfidf_augment<R: Rng + ?Sized>(
    text: &TokenizedText,
    rate: f64,
    model: &TfidfModel,
    rng: &mut R,
) -> TokenizedText {
    let mut out = text.clone();
    tfidf_in_place(&mut out, rate, model, rng);
    out
}

pub(crate) fn tfidf_in_place<R: Rng + ?Sized>(
    text: &mut TokenizedText,
    rate: f64,
    model: &TfidfModel,
    rng: &mut R,
) {
    let positions = text.word_positions();
    let count = replacement_count(rate, positions.len());
    if count == 0 {
        return;
    }

    let lowered: Vec<String> = positions.iter().map(|&i| text.tokens()[i].text.to_lowercase()).collect();
    let mut tf = std::collections::HashMap::new();
    for w in &lowered {
        *tf.entry(w.as_str()).or_insert(0u32) += 1;
    }
    let scores: Vec<f64> = lowered.iter().map(|w| f64::from(tf[w.as_str()]) * model.idf(w)).collect();
    let max_score = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut weights: Vec<f64> = scores.iter().map(|s| max_score - s + SCORE_EPSILON).collect();

    let mut targets = Vec::with_capacity(count);
    for _ in 0..count {
        let total: f64 = weights.iter().sum();
        let mut u = rng.random::<f64>() * total;
        let mut chosen = None;
        for (i, &w) in weights.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            chosen = Some(i);
            if u < w {
                break;
            }
            u -= w;
        }
        let i = chosen.expect("at least one word remains");
        weights[i] = 0.0;
        targets.push(i);
    }
    targets.sort_unstable();

    for i in targets {
        if let Some(replacement) = draw_vocabulary_word(model, &lowered[i], rng) {
            let pos = positions[i];
            let replacement = match_initial_case(&text.tokens()[pos].text, replacement);
            text.replace_text(pos, replacement);
        }
    }
}

/// Draws a vocabulary token with probability proportional to its corpus
/// mass, conditioned on not being `exclude`.
fn draw_vocabulary_word<'m, R: Rng + ?Sized>(
    model: &'m TfidfModel,
    exclude: &str,
    rng: &mut R,
) -> Option<&'m str> {
    let excluded = model.vocab_index(exclude);
    let excluded_mass = excluded.map_or(0.0, |i| model.mass(i));
    let available = model.total_mass() - excluded_mass;
    if model.vocabulary().len() <= usize::from(excluded.is_some()) || available <= 0.0 {
        return None;
    }
    let mut u = rng.random::<f64>() * available;
    if let Some(i) = excluded {
        if u >= model.mass_before(i) {
            u += excluded_mass;
        }
    }
    let mut pick = model.entry_at_mass(u);
    if Some(pick) == excluded {
        // Float edge at an interval boundary; step to a neighbour.
        pick = if pick + 1 < model.vocabulary().len() { pick + 1 } else { pick - 1 };
    }
    Some(model.vocabulary()[pick].token.as_str())
}

/// Replaces letters with a neighbouring key, keeping their case.
pub fn keyboard_augment<R: Rng + ?Sized>(
    text: &TokenizedText,
    rate: f64,
    layout: &KeyboardLayout,
    rng: &mut R,
) -> TokenizedText {
    let mut out = text.clone();
    keyboard_in_place(&mut out, rate, layout, rng);
    out
}

pub(crate) fn keyboard_in_place<R: Rng + ?Sized>(
    text: &mut TokenizedText,
    rate: f64,
    layout: &KeyboardLayout,
    rng: &mut R,
) {
    // (token position, char index within token)
    let mut eligible = Vec::new();
    for pos in text.word_positions() {
        for (ci, c) in text.tokens()[pos].text.chars().enumerate() {
            if c.is_alphabetic() && layout.neighbors(c).is_some() {
                eligible.push((pos, ci));
            }
        }
    }
    let count = replacement_count(rate, eligible.len());
    if count == 0 {
        return;
    }
    let mut edited: Vec<Option<Vec<char>>> = vec![None; text.len()];
    for slot in uniform_targets(rng, eligible.len(), count) {
        let (pos, ci) = eligible[slot];
        let chars = edited[pos].get_or_insert_with(|| text.tokens()[pos].text.chars().collect());
        let original = chars[ci];
        let options = layout.neighbors(original).expect("eligible chars have neighbours");
        let pick = options[rng.random_range(0..options.len())];
        chars[ci] = if original.is_uppercase() {
            let mut upper = pick.to_uppercase();
            match (upper.next(), upper.next()) {
                (Some(u), None) => u,
                _ => pick,
            }
        } else {
            pick
        };
    }
    for (pos, chars) in edited.into_iter().enumerate() {
        if let Some(chars) = chars {
            text.replace_text(pos, chars.into_iter().collect());
        }
    }
    debug_assert!(text
        .tokens()
        .iter()
        .filter(|t| t.kind == TokenKind::Word)
        .all(|t| !t.text.chars().any(char::is_whitespace)));
}
