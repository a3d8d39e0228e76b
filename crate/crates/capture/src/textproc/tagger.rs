use std::collections::HashMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

use super::{PosTag, Token};

#[derive(Debug, Error)]
pub enum TaggerError {
    #[error("failed to read tag lexicon {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed tag lexicon line {line}: {text:?}")]
    Malformed { line: usize, text: String },
    #[error("unknown tag {tag:?} on line {line}")]
    UnknownTag { tag: String, line: usize },
}

/// Lexicon-first part-of-speech tagger with suffix fallback rules.
///
/// The lexicon carries each word's most frequent tag; unknown words fall
/// through suffix rules (-ly, -ing/-ed, -ous/-ful/-ish, -tion/-ness/-ment)
/// and finally default to noun.
#[derive(Debug, Clone)]
pub struct PosTagger {
    lexicon: HashMap<String, PosTag>,
}

impl PosTagger {
    pub fn from_content(content: &str) -> Result<Self, TaggerError> {
        let mut lexicon = HashMap::new();
        for (idx, line) in content.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, tag) = line.split_once('\t').ok_or(TaggerError::Malformed {
                line: idx + 1,
                text: line.to_string(),
            })?;
            let tag = parse_tag(tag.trim()).ok_or(TaggerError::UnknownTag {
                tag: tag.to_string(),
                line: idx + 1,
            })?;
            lexicon.insert(word.to_lowercase(), tag);
        }
        Ok(PosTagger { lexicon })
    }

    pub fn from_path(path: &Path) -> Result<Self, TaggerError> {
        let content = fs::read_to_string(path).map_err(|source| TaggerError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_content(&content)
    }

    /// Fills in the `pos` field of every token, in order.
    pub fn tag(&self, mut tokens: Vec<Token>) -> Vec<Token> {
        for i in 0..tokens.len() {
            let prev = if i > 0 { Some(tokens[i - 1].pos) } else { None };
            tokens[i].pos = self.tag_one(&tokens[i].lower, prev);
        }
        tokens
    }

    fn tag_one(&self, lower: &str, prev: Option<PosTag>) -> PosTag {
        if let Some(&tag) = self.lexicon.get(lower) {
            return tag;
        }
        if lower.chars().all(|c| c.is_ascii_digit() || c == '.')
            && lower.chars().any(|c| c.is_ascii_digit())
        {
            return PosTag::Num;
        }
        if !lower.chars().next().is_some_and(char::is_alphanumeric) {
            return PosTag::Other;
        }
        if lower.contains('-') {
            // hyphenated compounds act as attribute phrases
            return PosTag::Adj;
        }
        if lower.len() > 3 && lower.ends_with("ly") {
            return PosTag::Adv;
        }
        if lower.len() > 4 && (lower.ends_with("ing") || lower.ends_with("ed")) {
            // participle after a determiner or another modifier reads as a
            // modifier; after anything else it reads as the clause verb
            return match prev {
                Some(PosTag::Det) | Some(PosTag::Adj) | Some(PosTag::Num) => PosTag::Adj,
                _ => PosTag::Verb,
            };
        }
        if lower.len() > 4
            && (lower.ends_with("ous") || lower.ends_with("ful") || lower.ends_with("ish"))
        {
            return PosTag::Adj;
        }
        if lower.len() > 5
            && (lower.ends_with("tion") || lower.ends_with("ness") || lower.ends_with("ment"))
        {
            return PosTag::Noun;
        }
        PosTag::Noun
    }
}

fn parse_tag(s: &str) -> Option<PosTag> {
    Some(match s {
        "NOUN" => PosTag::Noun,
        "VERB" => PosTag::Verb,
        "ADJ" => PosTag::Adj,
        "ADV" => PosTag::Adv,
        "PREP" => PosTag::Prep,
        "DET" => PosTag::Det,
        "PRON" => PosTag::Pron,
        "NUM" => PosTag::Num,
        "OTHER" => PosTag::Other,
        _ => return None,
    })
}
