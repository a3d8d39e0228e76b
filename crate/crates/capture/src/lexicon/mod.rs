//! Read-only lexical resources: lemmatizer, synonym-set index, stop-word
//! set, and the phrase-embedding providers used by soft matching.

mod embedding;
mod wordnet;

pub use embedding::{EmbeddingError, EmbeddingProvider, WordVectorProvider};
#[cfg(feature = "http-embeddings")]
pub use embedding::HttpEmbeddingProvider;
pub(crate) use embedding::cosine;
pub use wordnet::{LexiconError, LexiconStore, WordNetPos};

/// Bundled default resources, compiled into the library so the toolkit
/// works out of the box. Each can be overridden with an external file.
pub mod bundled {
    pub const STOPWORDS: &str = include_str!("../../data/stopwords.txt");
    pub const TAG_LEXICON: &str = include_str!("../../data/tag_lexicon.tsv");
    pub const ABBREVIATIONS: &str = include_str!("../../data/abbreviations.txt");
    pub const VECTORS: &str = include_str!("../../data/vectors.txt");

    pub const INDEX_NOUN: &str = include_str!("../../data/wordnet/index.noun");
    pub const INDEX_VERB: &str = include_str!("../../data/wordnet/index.verb");
    pub const INDEX_ADJ: &str = include_str!("../../data/wordnet/index.adj");
    pub const INDEX_ADV: &str = include_str!("../../data/wordnet/index.adv");
    pub const DATA_NOUN: &str = include_str!("../../data/wordnet/data.noun");
    pub const DATA_VERB: &str = include_str!("../../data/wordnet/data.verb");
    pub const DATA_ADJ: &str = include_str!("../../data/wordnet/data.adj");
    pub const DATA_ADV: &str = include_str!("../../data/wordnet/data.adv");
    pub const EXC_NOUN: &str = include_str!("../../data/wordnet/noun.exc");
    pub const EXC_VERB: &str = include_str!("../../data/wordnet/verb.exc");
    pub const EXC_ADJ: &str = include_str!("../../data/wordnet/adj.exc");
    pub const EXC_ADV: &str = include_str!("../../data/wordnet/adv.exc");
}
