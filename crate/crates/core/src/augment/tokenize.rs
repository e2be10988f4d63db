//! Lossless word / punctuation / whitespace segmentation.

use std::borrow::Cow;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Word,
    Punctuation,
    Whitespace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub kind: TokenKind,
}

/// A text split into tokens whose concatenation is the original text.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenizedText {
    tokens: Vec<Token>,
}

impl TokenizedText {
    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Positions of word tokens.
    pub fn word_positions(&self) -> Vec<usize> {
        self.tokens.iter().enumerate().filter(|(_, t)| t.kind == TokenKind::Word).map(|(i, _)| i).collect()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().filter(|t| t.kind == TokenKind::Word).map(|t| t.text.as_str())
    }

    pub(crate) fn replace_text(&mut self, index: usize, text: String) {
        self.tokens[index].text = text;
    }

    pub fn detokenize(&self) -> String {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }
}

impl fmt::Display for TokenizedText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.tokens {
            f.write_str(&t.text)?;
        }
        Ok(())
    }
}

/// `word` lowercased, borrowing when it has no uppercase characters.
pub(crate) fn lowercase(word: &str) -> Cow<'_, str> {
    if word.chars().any(char::is_uppercase) {
        Cow::Owned(word.to_lowercase())
    } else {
        Cow::Borrowed(word)
    }
}

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '-')
}

/// Borrowed segments of `text` in order, with the same boundaries as
/// [`tokenize`].
pub fn segments(text: &str) -> impl Iterator<Item = (&str, TokenKind)> {
    let mut rest = text;
    std::iter::from_fn(move || {
        let mut chars = rest.char_indices().peekable();
        let (_, c) = chars.next()?;
        let kind = if c.is_alphanumeric() {
            TokenKind::Word
        } else if c.is_whitespace() {
            TokenKind::Whitespace
        } else {
            TokenKind::Punctuation
        };
        let end = match kind {
            TokenKind::Word => loop {
                match chars.next() {
                    Some((_, c)) if c.is_alphanumeric() => {}
                    Some((b, c)) if is_joiner(c) => match chars.peek() {
                        Some(&(_, n)) if n.is_alphanumeric() => {}
                        _ => break b,
                    },
                    Some((b, _)) => break b,
                    None => break rest.len(),
                }
            },
            TokenKind::Whitespace => loop {
                match chars.next() {
                    Some((_, c)) if c.is_whitespace() => {}
                    Some((b, _)) => break b,
                    None => break rest.len(),
                }
            },
            TokenKind::Punctuation => c.len_utf8(),
        };
        let (head, tail) = rest.split_at(end);
        rest = tail;
        Some((head, kind))
    })
}

/// The word segments of `text`.
pub fn words(text: &str) -> impl Iterator<Item = &str> {
    segments(text).filter(|(_, k)| *k == TokenKind::Word).map(|(w, _)| w)
}

/// Words are maximal runs of alphanumerics, joined across single internal
/// apostrophes or hyphens. Whitespace runs form one token; every other
/// character is its own punctuation token.
pub fn tokenize(text: &str) -> TokenizedText {
    TokenizedText { tokens: segments(text).map(|(t, kind)| Token { text: t.to_owned(), kind }).collect() }
}
