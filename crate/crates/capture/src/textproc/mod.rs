//! Deterministic text primitives: sentence splitting, tokenization,
//! rule-based part-of-speech tagging and Porter stemming.

mod porter;
mod sentence;
mod tagger;
mod tokenize;

pub use porter::porter_stem;
pub use sentence::SentenceSplitter;
pub use tagger::{PosTagger, TaggerError};
pub use tokenize::{detokenize, tokenize};

use unicode_normalization::{is_nfc, UnicodeNormalization};

/// Unicode NFC normalization, applied once at caption entry points.
pub fn normalize(text: &str) -> std::borrow::Cow<'_, str> {
    if is_nfc(text) {
        std::borrow::Cow::Borrowed(text)
    } else {
        std::borrow::Cow::Owned(text.nfc().collect())
    }
}

/// Coarse part-of-speech tags produced by [`PosTagger`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosTag {
    Noun,
    Verb,
    Adj,
    Adv,
    Prep,
    Det,
    Pron,
    Num,
    Other,
}

/// A single token with its source span (byte offsets) and tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub lower: String,
    pub pos: PosTag,
    pub span: (usize, usize),
}

impl Token {
    fn new(surface: &str, start: usize, end: usize) -> Self {
        Token {
            surface: surface.to_string(),
            lower: surface.to_lowercase(),
            pos: PosTag::Other,
            span: (start, end),
        }
    }
}
