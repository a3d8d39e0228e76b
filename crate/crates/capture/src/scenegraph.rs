//! Visual-element extraction: objects, attribute bindings and relation
//! triplets parsed from captions, merged per sentence into one
//! deduplicated graph.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{LexiconStore, WordNetPos};
use crate::textproc::{tokenize, PosTag, PosTagger, SentenceSplitter, Token};

#[derive(Debug, Error)]
pub enum SceneGraphError {
    #[error("attribute ({0}, {1}) references an object missing from the record")]
    DanglingAttribute(String, String),
    #[error("relation ({0}, {1}, {2}) references an object missing from the record")]
    DanglingRelation(String, String, String),
}

/// Deduplicated element sets extracted from one or more captions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ElementSets {
    pub objects: BTreeSet<String>,
    /// (object lemma, attribute lemma) bindings.
    pub attributes: BTreeSet<(String, String)>,
    /// (subject, predicate phrase, object) triplets.
    pub relations: BTreeSet<(String, String, String)>,
}

impl ElementSets {
    pub fn is_empty(&self) -> bool {
        self.objects.is_empty() && self.attributes.is_empty() && self.relations.is_empty()
    }

    /// Set-union merge; idempotent, commutative and associative.
    pub fn merge(&self, other: &ElementSets) -> ElementSets {
        let mut out = self.clone();
        out.objects.extend(other.objects.iter().cloned());
        out.attributes.extend(other.attributes.iter().cloned());
        out.relations.extend(other.relations.iter().cloned());
        out
    }

    /// Drops objects failing `keep`, cascading to their attributes and any
    /// relation touching them.
    fn retain_objects(&mut self, keep: impl Fn(&str) -> bool) {
        let removed: BTreeSet<String> = self
            .objects
            .iter()
            .filter(|o| !keep(o))
            .cloned()
            .collect();
        if removed.is_empty() {
            return;
        }
        self.objects.retain(|o| !removed.contains(o));
        self.attributes.retain(|(o, _)| !removed.contains(o));
        self.relations
            .retain(|(s, _, o)| !removed.contains(s) && !removed.contains(o));
    }
}

/// How a graph was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    RuleParser,
    External,
}

/// The parse of one caption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SceneGraph {
    pub elements: ElementSets,
    pub source_sentences: Vec<String>,
    pub provenance: Provenance,
}

/// External-tuple record, the ingestion schema for graphs produced by an
/// out-of-band parser.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExternalTuples {
    pub caption: String,
    pub objects: Vec<String>,
    #[serde(default)]
    pub attributes: Vec<(String, String)>,
    #[serde(default)]
    pub relations: Vec<(String, String, String)>,
}

/// Rule-based caption parser: sentence split, tag, extract, merge, filter.
pub struct CaptionParser {
    splitter: SentenceSplitter,
    tagger: PosTagger,
    lexicon: Arc<LexiconStore>,
    use_stopwords: bool,
}

/// Copular verbs whose following adjectives describe the subject.
const COPULAR: &[&str] = &["be", "seem", "appear", "look"];

/// Auxiliaries dropped from relation predicates.
const AUXILIARY: &[&str] = &[
    "be", "have", "do", "will", "would", "can", "could", "may", "might", "must", "shall",
    "should",
];

impl CaptionParser {
    pub fn new(
        splitter: SentenceSplitter,
        tagger: PosTagger,
        lexicon: Arc<LexiconStore>,
        use_stopwords: bool,
    ) -> Self {
        CaptionParser {
            splitter,
            tagger,
            lexicon,
            use_stopwords,
        }
    }

    /// Parser over the compiled-in default resources.
    pub fn bundled(lexicon: Arc<LexiconStore>, use_stopwords: bool) -> Self {
        use crate::lexicon::bundled as b;
        CaptionParser::new(
            SentenceSplitter::from_content(b::ABBREVIATIONS),
            PosTagger::from_content(b::TAG_LEXICON).expect("bundled tag lexicon is valid"),
            lexicon,
            use_stopwords,
        )
    }

    pub fn lexicon(&self) -> &Arc<LexiconStore> {
        &self.lexicon
    }

    /// Splits the caption into sentences, extracts per-sentence tuples,
    /// merges them and applies stop-word and appearance filtering.
    pub fn parse_caption(&self, text: &str) -> SceneGraph {
        let text = crate::textproc::normalize(text);
        let text = text.as_ref();
        let sentences = self.splitter.split(text);
        let mut merged = ElementSets::default();
        for sentence in &sentences {
            let tokens = self.tagger.tag(tokenize(sentence));
            merged = merged.merge(&self.extract_tuples(&tokens));
        }
        self.filter(&mut merged, text);
        SceneGraph {
            elements: merged,
            source_sentences: sentences,
            provenance: Provenance::RuleParser,
        }
    }

    /// Runs externally produced tuples through the same lemmatize, merge
    /// and filter pipeline.
    pub fn ingest_external(&self, record: &ExternalTuples) -> Result<SceneGraph, SceneGraphError> {
        let lex = &self.lexicon;
        let lemma_word = |w: &str, pos: WordNetPos| lex.lemmatize(&w.to_lowercase(), pos);
        let lemma_phrase = |p: &str, pos: WordNetPos| {
            p.split_whitespace()
                .map(|w| lemma_word(w, pos))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut sets = ElementSets::default();
        for o in &record.objects {
            sets.objects.insert(lemma_phrase(o, WordNetPos::Noun));
        }
        for (o, a) in &record.attributes {
            let object = lemma_phrase(o, WordNetPos::Noun);
            if !sets.objects.contains(&object) {
                return Err(SceneGraphError::DanglingAttribute(o.clone(), a.clone()));
            }
            sets.attributes
                .insert((object, lemma_phrase(a, WordNetPos::Adj)));
        }
        for (s, p, o) in &record.relations {
            let subject = lemma_phrase(s, WordNetPos::Noun);
            let object = lemma_phrase(o, WordNetPos::Noun);
            if !sets.objects.contains(&subject) || !sets.objects.contains(&object) {
                return Err(SceneGraphError::DanglingRelation(
                    s.clone(),
                    p.clone(),
                    o.clone(),
                ));
            }
            sets.relations
                .insert((subject, lemma_phrase(p, WordNetPos::Verb), object));
        }
        self.filter(&mut sets, &record.caption);
        Ok(SceneGraph {
            elements: sets,
            source_sentences: self.splitter.split(&record.caption),
            provenance: Provenance::External,
        })
    }

    fn filter(&self, sets: &mut ElementSets, caption: &str) {
        if self.use_stopwords {
            let lex = &self.lexicon;
            sets.retain_objects(|o| !lex.is_stopword(o));
        }
        // appearance guard: drop objects whose lemma (or an inflection of
        // it) never occurs in the caption, the way hallucinated pronoun
        // referents slip through an upstream parser
        if !caption.trim().is_empty() {
            let words: BTreeSet<String> = tokenize(caption)
                .into_iter()
                .map(|t| t.lower)
                .collect();
            let lex = &self.lexicon;
            sets.retain_objects(|lemma| {
                lemma.split_whitespace().all(|w| {
                    words.contains(w)
                        || lex
                            .inflections(w, WordNetPos::Noun)
                            .iter()
                            .any(|f| words.contains(f))
                })
            });
        }
    }

    /// Extracts raw (pre-merge, pre-filter) element sets from one tagged
    /// sentence. Pattern misses yield fewer tuples, never failure.
    pub fn extract_tuples(&self, tokens: &[Token]) -> ElementSets {
        let mut sets = ElementSets::default();
        let segments = self.segment(tokens);
        let phrases: Vec<&NounPhrase> = segments
            .iter()
            .filter_map(|s| match s {
                Segment::Phrase(np) => Some(np),
                Segment::Word(_) => None,
            })
            .collect();
        for np in &phrases {
            sets.objects.insert(np.head.clone());
            for m in &np.modifiers {
                sets.attributes.insert((np.head.clone(), m.clone()));
            }
        }
        // relation and copular-attribute patterns over the gaps between
        // noun phrases
        let mut idx = 0;
        while idx < segments.len() {
            let Segment::Phrase(subject) = &segments[idx] else {
                idx += 1;
                continue;
            };
            let mut j = idx + 1;
            let mut verbs: Vec<&Token> = Vec::new();
            let mut preposition: Option<&Token> = None;
            let mut valid = true;
            while j < segments.len() {
                match &segments[j] {
                    Segment::Phrase(_) => break,
                    Segment::Word(t) => match t.pos {
                        PosTag::Adv => {}
                        PosTag::Verb if preposition.is_none() => verbs.push(t),
                        PosTag::Prep if preposition.is_none() => preposition = Some(t),
                        _ => {
                            valid = false;
                            break;
                        }
                    },
                }
                j += 1;
            }
            if valid {
                if let Some(Segment::Phrase(object)) = segments.get(j) {
                    if let Some(predicate) = self.predicate(&verbs, preposition) {
                        sets.relations.insert((
                            subject.head.clone(),
                            predicate,
                            object.head.clone(),
                        ));
                    }
                }
            }
            // copular adjectives: "X is ADJ (and ADJ)*" with no object NP
            self.copular_attributes(&segments, idx, &mut sets);
            idx += 1;
        }
        sets
    }

    fn copular_attributes(&self, segments: &[Segment], np_idx: usize, sets: &mut ElementSets) {
        let Segment::Phrase(subject) = &segments[np_idx] else {
            return;
        };
        let mut j = np_idx + 1;
        let mut saw_copula = false;
        while let Some(Segment::Word(t)) = segments.get(j) {
            match t.pos {
                PosTag::Verb => {
                    let lemma = self.lexicon.lemmatize(&t.lower, WordNetPos::Verb);
                    if !COPULAR.contains(&lemma.as_str()) {
                        return;
                    }
                    saw_copula = true;
                }
                PosTag::Adv => {}
                _ => break,
            }
            j += 1;
        }
        if !saw_copula {
            return;
        }
        // collect adjectives, allowing "and" / commas between them
        while let Some(Segment::Word(t)) = segments.get(j) {
            match t.pos {
                PosTag::Adj | PosTag::Num => {
                    let lemma = self.lexicon.lemmatize(&t.lower, WordNetPos::Adj);
                    sets.attributes.insert((subject.head.clone(), lemma));
                }
                PosTag::Adv => {}
                PosTag::Other if matches!(t.lower.as_str(), "and" | ",") => {}
                _ => break,
            }
            j += 1;
        }
    }

    fn predicate(&self, verbs: &[&Token], preposition: Option<&Token>) -> Option<String> {
        let lex = &self.lexicon;
        let mut words: Vec<String> = verbs
            .iter()
            .map(|t| lex.lemmatize(&t.lower, WordNetPos::Verb))
            .filter(|l| !AUXILIARY.contains(&l.as_str()))
            .collect();
        if words.is_empty() {
            match (verbs.is_empty(), preposition) {
                // bare preposition bridge: "dog on bench"
                (true, Some(p)) => return Some(p.lower.clone()),
                // copula plus preposition: "car is near tree"
                (false, Some(p)) => return Some(p.lower.clone()),
                // pure copula: "X is Y"
                (false, None) => return Some("be".to_string()),
                (true, None) => return None,
            }
        }
        if let Some(p) = preposition {
            words.push(p.lower.clone());
        }
        Some(words.join(" "))
    }

    /// Groups tokens into noun phrases; everything else stays a bare word.
    fn segment(&self, tokens: &[Token]) -> Vec<Segment> {
        let lex = &self.lexicon;
        let mut segments = Vec::new();
        let mut current: Vec<&Token> = Vec::new();
        let mut has_noun = false;

        let flush =
            |current: &mut Vec<&Token>, has_noun: &mut bool, segments: &mut Vec<Segment>| {
                if *has_noun {
                    let head_pos = current
                        .iter()
                        .rposition(|t| t.pos == PosTag::Noun)
                        .expect("noun present");
                    let head = lex.lemmatize(&current[head_pos].lower, WordNetPos::Noun);
                    let modifiers = current[..head_pos]
                        .iter()
                        .filter(|t| matches!(t.pos, PosTag::Adj | PosTag::Num))
                        .map(|t| lex.lemmatize(&t.lower, WordNetPos::Adj))
                        .collect();
                    segments.push(Segment::Phrase(NounPhrase {
                        head,
                        modifiers,
                    }));
                } else {
                    segments.extend(current.iter().map(|t| Segment::Word((*t).clone())));
                }
                current.clear();
                *has_noun = false;
            };

        for token in tokens {
            match token.pos {
                PosTag::Noun => {
                    current.push(token);
                    has_noun = true;
                }
                PosTag::Det | PosTag::Adj | PosTag::Num => {
                    if has_noun {
                        // a new determiner or modifier after the head
                        // starts the next phrase
                        flush(&mut current, &mut has_noun, &mut segments);
                    }
                    current.push(token);
                }
                PosTag::Adv if !has_noun && !current.is_empty() => {
                    // adverb inside a forming phrase ("a very tall tree")
                    current.push(token);
                }
                _ => {
                    flush(&mut current, &mut has_noun, &mut segments);
                    segments.push(Segment::Word(token.clone()));
                }
            }
        }
        flush(&mut current, &mut has_noun, &mut segments);
        segments
    }
}

struct NounPhrase {
    head: String,
    modifiers: Vec<String>,
}

enum Segment {
    Phrase(NounPhrase),
    Word(Token),
}
