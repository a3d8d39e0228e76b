//! Caption evaluation toolkit.
//!
//! The core metric scores a candidate caption against reference captions by
//! extracting visual elements (objects, attributes, relations) from each
//! caption, matching them in three stages (exact, synonym, embedding-based
//! soft matching), and combining per-type F1 scores into one weighted value.
//! The crate also ships classic n-gram baselines (BLEU, ROUGE-L, CIDEr-D,
//! METEOR) and rank statistics for measuring agreement between any metric
//! and expert judgements.
//!
//! Enable the `parallel` feature (on by default) to fan dataset evaluation
//! out across a rayon thread pool; without it everything runs sequentially.
//!
//! ```
//! use std::sync::Arc;
//! use capture::matcher::MatchConfig;
//! use capture::{CaptionParser, CaptureScorer, LexiconStore, WordVectorProvider};
//!
//! let lexicon = Arc::new(LexiconStore::bundled());
//! let parser = CaptionParser::bundled(lexicon.clone(), true);
//! let scorer = CaptureScorer::new(
//!     lexicon,
//!     Some(Arc::new(WordVectorProvider::bundled())),
//!     MatchConfig::default(),
//! );
//! let result = scorer.score_captions(
//!     &parser,
//!     "A crimson automobile is parked near a tall tree.",
//!     &["A red car is parked near a tall tree.".to_string()],
//! )?;
//! assert_eq!(result.score, 1.0);
//! # Ok::<(), capture::matcher::MatchError>(())
//! ```

pub mod baselines;
pub mod consistency;
pub mod datamodel;
pub mod lexicon;
pub mod matcher;
pub mod scenegraph;
pub mod textproc;

pub use datamodel::{BenchmarkSample, CandidateEntry, EvaluationRecord};
pub use lexicon::{EmbeddingProvider, LexiconStore, WordVectorProvider};
pub use matcher::{
    evaluate_dataset, evaluate_dataset_seq, CaptureResult, CaptureScorer, MatchConfig,
    MatchWeights, MetricKind, SoftAggregation,
};
pub use scenegraph::{CaptionParser, ElementSets, SceneGraph};

/// Caps the rayon worker pool used by dataset evaluation; 0 keeps the
/// default (all cores). Calling after the pool exists is a no-op.
#[cfg(feature = "parallel")]
pub fn init_thread_pool(jobs: usize) {
    if jobs == 0 {
        return;
    }
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global();
}

#[cfg(not(feature = "parallel"))]
pub fn init_thread_pool(_jobs: usize) {}
