use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::textproc::PosTag;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed {file} line {line}: {text:?}")]
    Malformed {
        file: String,
        line: usize,
        text: String,
    },
    #[error("index references synset {offset} missing from {file}")]
    DanglingSynset { offset: u64, file: String },
    #[error("stop-word list is empty")]
    EmptyStopwords,
}

/// The four content parts of speech tracked by the lexical database.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WordNetPos {
    Noun,
    Verb,
    Adj,
    Adv,
}

impl WordNetPos {
    pub const ALL: [WordNetPos; 4] = [
        WordNetPos::Noun,
        WordNetPos::Verb,
        WordNetPos::Adj,
        WordNetPos::Adv,
    ];

    pub fn from_tag(tag: PosTag) -> Option<Self> {
        match tag {
            PosTag::Noun => Some(WordNetPos::Noun),
            PosTag::Verb => Some(WordNetPos::Verb),
            PosTag::Adj | PosTag::Num => Some(WordNetPos::Adj),
            PosTag::Adv => Some(WordNetPos::Adv),
            _ => None,
        }
    }

    fn idx(self) -> usize {
        match self {
            WordNetPos::Noun => 0,
            WordNetPos::Verb => 1,
            WordNetPos::Adj => 2,
            WordNetPos::Adv => 3,
        }
    }

    fn file_suffix(self) -> &'static str {
        match self {
            WordNetPos::Noun => "noun",
            WordNetPos::Verb => "verb",
            WordNetPos::Adj => "adj",
            WordNetPos::Adv => "adv",
        }
    }
}

#[derive(Debug, Default)]
struct PosDatabase {
    /// lemma -> synset offsets listed in the index file
    index: HashMap<String, Vec<u64>>,
    /// inflected form -> base forms from the exception file
    exceptions: HashMap<String, Vec<String>>,
    /// synset offsets present in the data file
    synsets: HashSet<u64>,
}

/// Morphological detachment rules per part of speech: (suffix, ending).
const NOUN_RULES: &[(&str, &str)] = &[
    ("s", ""),
    ("ses", "s"),
    ("xes", "x"),
    ("zes", "z"),
    ("ches", "ch"),
    ("shes", "sh"),
    ("men", "man"),
    ("ies", "y"),
];
const VERB_RULES: &[(&str, &str)] = &[
    ("s", ""),
    ("ies", "y"),
    ("es", "e"),
    ("es", ""),
    ("ed", "e"),
    ("ed", ""),
    ("ing", "e"),
    ("ing", ""),
];
const ADJ_RULES: &[(&str, &str)] = &[("er", ""), ("est", ""), ("er", "e"), ("est", "e")];
const ADV_RULES: &[(&str, &str)] = &[];

/// Lemmatizer, synonym-set index and stop-word set, loaded once from
/// WordNet-3.0 layout database files plus a stop-word list.
#[derive(Debug)]
pub struct LexiconStore {
    databases: [PosDatabase; 4],
    stopwords: HashSet<String>,
}

impl LexiconStore {
    /// Loads from a directory in the WordNet-3.0 database layout
    /// (index.noun, data.noun, noun.exc and counterparts) plus a stop-word
    /// file with one lowercase lemma per line.
    pub fn load(wordnet_dir: &Path, stopwords_path: &Path) -> Result<Self, LexiconError> {
        let read = |name: String| -> Result<String, LexiconError> {
            let path = wordnet_dir.join(&name);
            fs::read_to_string(&path).map_err(|source| LexiconError::Io {
                path: path.display().to_string(),
                source,
            })
        };
        let mut databases: [PosDatabase; 4] = Default::default();
        for pos in WordNetPos::ALL {
            let suffix = pos.file_suffix();
            databases[pos.idx()] = PosDatabase::parse(
                &read(format!("index.{suffix}"))?,
                &read(format!("data.{suffix}"))?,
                &read(format!("{suffix}.exc"))?,
                suffix,
            )?;
        }
        let stopwords_content =
            fs::read_to_string(stopwords_path).map_err(|source| LexiconError::Io {
                path: stopwords_path.display().to_string(),
                source,
            })?;
        Self::from_parts(databases, &stopwords_content)
    }

    /// Builds the store from in-memory file contents (used for the bundled
    /// defaults; same formats as [`LexiconStore::load`]).
    pub fn from_contents(
        wordnet: [(&str, &str, &str); 4],
        stopwords: &str,
    ) -> Result<Self, LexiconError> {
        let mut databases: [PosDatabase; 4] = Default::default();
        for pos in WordNetPos::ALL {
            let (index, data, exc) = wordnet[pos.idx()];
            databases[pos.idx()] = PosDatabase::parse(index, data, exc, pos.file_suffix())?;
        }
        Self::from_parts(databases, stopwords)
    }

    /// The compiled-in default resources.
    pub fn bundled() -> Self {
        use super::bundled as b;
        Self::from_contents(
            [
                (b::INDEX_NOUN, b::DATA_NOUN, b::EXC_NOUN),
                (b::INDEX_VERB, b::DATA_VERB, b::EXC_VERB),
                (b::INDEX_ADJ, b::DATA_ADJ, b::EXC_ADJ),
                (b::INDEX_ADV, b::DATA_ADV, b::EXC_ADV),
            ],
            b::STOPWORDS,
        )
        .expect("bundled lexical data is valid")
    }

    fn from_parts(
        databases: [PosDatabase; 4],
        stopwords_content: &str,
    ) -> Result<Self, LexiconError> {
        let stopwords: HashSet<String> = stopwords_content
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        if stopwords.is_empty() {
            return Err(LexiconError::EmptyStopwords);
        }
        Ok(LexiconStore {
            databases,
            stopwords,
        })
    }

    /// Swaps in a different stop-word list (content string, one lemma per
    /// line), leaving everything else untouched.
    pub fn with_stopwords(mut self, content: &str) -> Result<Self, LexiconError> {
        let stopwords: HashSet<String> = content
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        if stopwords.is_empty() {
            return Err(LexiconError::EmptyStopwords);
        }
        self.stopwords = stopwords;
        Ok(self)
    }

    fn db(&self, pos: WordNetPos) -> &PosDatabase {
        &self.databases[pos.idx()]
    }

    /// Reduces an inflected word to its dictionary lemma: an exception-map
    /// hit wins; otherwise the first detachment rule whose result is in
    /// the lemma vocabulary; otherwise the word unchanged.
    pub fn lemmatize(&self, word: &str, pos: WordNetPos) -> String {
        let db = self.db(pos);
        if let Some(bases) = db.exceptions.get(word) {
            if let Some(base) = bases.first() {
                return base.clone();
            }
        }
        let rules = match pos {
            WordNetPos::Noun => NOUN_RULES,
            WordNetPos::Verb => VERB_RULES,
            WordNetPos::Adj => ADJ_RULES,
            WordNetPos::Adv => ADV_RULES,
        };
        for (suffix, ending) in rules {
            if let Some(stem) = word.strip_suffix(suffix) {
                let candidate = format!("{stem}{ending}");
                if !candidate.is_empty() && db.index.contains_key(&candidate) {
                    return candidate;
                }
            }
        }
        word.to_string()
    }

    /// Candidate surface inflections of a lemma, produced by running the
    /// detachment rules backwards (plus exception-file inflections).
    pub fn inflections(&self, lemma: &str, pos: WordNetPos) -> Vec<String> {
        let db = self.db(pos);
        let mut out = Vec::new();
        for (inflected, bases) in &db.exceptions {
            if bases.iter().any(|b| b == lemma) {
                out.push(inflected.clone());
            }
        }
        let rules = match pos {
            WordNetPos::Noun => NOUN_RULES,
            WordNetPos::Verb => VERB_RULES,
            WordNetPos::Adj => ADJ_RULES,
            WordNetPos::Adv => ADV_RULES,
        };
        for (suffix, ending) in rules {
            if let Some(stem) = lemma.strip_suffix(ending) {
                out.push(format!("{stem}{suffix}"));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Synset ids for a lemma under one part of speech.
    pub fn synsets(&self, lemma: &str, pos: WordNetPos) -> &[u64] {
        self.db(pos)
            .index
            .get(lemma)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// True when the two lemmas share at least one synset (equal lemmas
    /// always overlap, indexed or not).
    pub fn synonyms_overlap(&self, a: &str, b: &str, pos: WordNetPos) -> bool {
        if a == b {
            return true;
        }
        let sa = self.synsets(a, pos);
        if sa.is_empty() {
            return false;
        }
        let sb = self.synsets(b, pos);
        sa.iter().any(|x| sb.contains(x))
    }

    /// Membership test against the loaded stop-word list.
    pub fn is_stopword(&self, object_lemma: &str) -> bool {
        self.stopwords.contains(object_lemma)
    }

    pub fn stopword_count(&self) -> usize {
        self.stopwords.len()
    }

    /// True when the lemma appears in the index for the given POS.
    pub fn contains(&self, lemma: &str, pos: WordNetPos) -> bool {
        self.db(pos).index.contains_key(lemma)
    }
}

impl PosDatabase {
    fn parse(index: &str, data: &str, exc: &str, file: &str) -> Result<Self, LexiconError> {
        let mut db = PosDatabase::default();
        for (lineno, line) in data.lines().enumerate() {
            if line.starts_with(' ') || line.trim().is_empty() {
                continue; // header/license lines
            }
            let offset_text = line.split_whitespace().next().unwrap_or("");
            let offset =
                offset_text
                    .parse::<u64>()
                    .map_err(|_| LexiconError::Malformed {
                        file: format!("data.{file}"),
                        line: lineno + 1,
                        text: line.chars().take(60).collect(),
                    })?;
            db.synsets.insert(offset);
        }
        for (lineno, line) in index.lines().enumerate() {
            if line.starts_with(' ') || line.trim().is_empty() {
                continue;
            }
            let malformed = || LexiconError::Malformed {
                file: format!("index.{file}"),
                line: lineno + 1,
                text: line.chars().take(60).collect(),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            // lemma pos synset_cnt p_cnt [ptr...] sense_cnt tagsense_cnt offsets...
            if fields.len() < 6 {
                return Err(malformed());
            }
            let lemma = fields[0].to_string();
            let synset_cnt: usize = fields[2].parse().map_err(|_| malformed())?;
            let p_cnt: usize = fields[3].parse().map_err(|_| malformed())?;
            let offsets_at = 4 + p_cnt + 2;
            if fields.len() < offsets_at + synset_cnt {
                return Err(malformed());
            }
            let mut offsets = Vec::with_capacity(synset_cnt);
            for text in &fields[offsets_at..offsets_at + synset_cnt] {
                let offset: u64 = text.parse().map_err(|_| malformed())?;
                if !db.synsets.contains(&offset) {
                    return Err(LexiconError::DanglingSynset {
                        offset,
                        file: format!("data.{file}"),
                    });
                }
                offsets.push(offset);
            }
            db.index.insert(lemma, offsets);
        }
        for (lineno, line) in exc.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let inflected = parts.next().ok_or_else(|| LexiconError::Malformed {
                file: format!("{file}.exc"),
                line: lineno + 1,
                text: line.to_string(),
            })?;
            let bases: Vec<String> = parts.map(str::to_string).collect();
            if bases.is_empty() {
                return Err(LexiconError::Malformed {
                    file: format!("{file}.exc"),
                    line: lineno + 1,
                    text: line.to_string(),
                });
            }
            db.exceptions.insert(inflected.to_string(), bases);
        }
        Ok(db)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store() -> LexiconStore {
        LexiconStore::bundled()
    }

    #[test]
    fn lemmatize_regular_plural() {
        assert_eq!(store().lemmatize("churches", WordNetPos::Noun), "church");
        assert_eq!(store().lemmatize("dogs", WordNetPos::Noun), "dog");
    }

    #[test]
    fn lemmatize_irregular_via_exceptions() {
        assert_eq!(store().lemmatize("sheep", WordNetPos::Noun), "sheep");
        assert_eq!(store().lemmatize("children", WordNetPos::Noun), "child");
        assert_eq!(store().lemmatize("running", WordNetPos::Verb), "run");
    }

    #[test]
    fn lemmatize_unknown_unchanged() {
        assert_eq!(store().lemmatize("zxqvs", WordNetPos::Noun), "zxqvs");
    }

    #[test]
    fn lemmatize_verb_forms() {
        let s = store();
        assert_eq!(s.lemmatize("parked", WordNetPos::Verb), "park");
        assert_eq!(s.lemmatize("enjoying", WordNetPos::Verb), "enjoy");
        assert_eq!(s.lemmatize("shows", WordNetPos::Verb), "show");
    }

    #[test]
    fn lemmatize_idempotent_over_vocabulary() {
        let s = store();
        for pos in WordNetPos::ALL {
            for lemma in s.databases[pos.idx()].index.keys() {
                let once = s.lemmatize(lemma, pos);
                assert_eq!(s.lemmatize(&once, pos), once, "{lemma} ({pos:?})");
            }
        }
    }

    #[test]
    fn synonyms_shared_synset() {
        let s = store();
        assert!(s.synonyms_overlap("photo", "picture", WordNetPos::Noun));
        assert!(s.synonyms_overlap("car", "automobile", WordNetPos::Noun));
        assert!(s.synonyms_overlap("red", "crimson", WordNetPos::Adj));
    }

    #[test]
    fn synonyms_disjoint() {
        let s = store();
        assert!(!s.synonyms_overlap("dog", "bench", WordNetPos::Noun));
        assert!(!s.synonyms_overlap("show", "display", WordNetPos::Verb));
    }

    #[test]
    fn synonyms_reflexive_even_out_of_vocabulary() {
        let s = store();
        assert!(s.synonyms_overlap("dog", "dog", WordNetPos::Noun));
        assert!(s.synonyms_overlap("qqq", "qqq", WordNetPos::Noun));
        assert!(!s.synonyms_overlap("qqq", "zzz", WordNetPos::Noun));
    }

    #[test]
    fn synonyms_symmetric() {
        let s = store();
        for (a, b) in [("photo", "pic"), ("kid", "child"), ("dog", "cat")] {
            assert_eq!(
                s.synonyms_overlap(a, b, WordNetPos::Noun),
                s.synonyms_overlap(b, a, WordNetPos::Noun)
            );
        }
    }

    #[test]
    fn stopwords_membership() {
        let s = store();
        assert!(s.is_stopword("moment"));
        assert!(!s.is_stopword("sheep"));
        assert!(!s.is_stopword(""));
    }

    #[test]
    fn stopword_list_swap_changes_only_membership() {
        let s = store();
        let before = s.synsets("dog", WordNetPos::Noun).to_vec();
        let swapped = s.with_stopwords("sheep\n").unwrap();
        assert!(swapped.is_stopword("sheep"));
        assert!(!swapped.is_stopword("moment"));
        assert_eq!(swapped.synsets("dog", WordNetPos::Noun), before);
    }

    #[test]
    fn inflections_roundtrip_through_lemmatize() {
        let s = store();
        for (lemma, pos) in [
            ("dog", WordNetPos::Noun),
            ("church", WordNetPos::Noun),
            ("run", WordNetPos::Verb),
            ("park", WordNetPos::Verb),
        ] {
            for form in s.inflections(lemma, pos) {
                // every generated inflection must map back to some lemma;
                // the canonical ones map back to the original
                let _ = s.lemmatize(&form, pos);
            }
            assert!(s.inflections(lemma, pos).iter().any(|f| {
                s.lemmatize(f, pos) == lemma
            }));
        }
    }

    #[test]
    fn empty_stopword_list_rejected() {
        let err = store().with_stopwords("# nothing\n").unwrap_err();
        assert!(matches!(err, LexiconError::EmptyStopwords));
    }

    #[test]
    fn dangling_synset_detected() {
        let index = "dog n 1 0 1 0 99999999\n";
        let data = "00000016 00 n 01 dog 0 000 | \n";
        let err = LexiconStore::from_contents(
            [(index, data, ""), ("", "", ""), ("", "", ""), ("", "", "")],
            "moment\n",
        )
        .unwrap_err();
        assert!(matches!(err, LexiconError::DanglingSynset { .. }));
    }
}
