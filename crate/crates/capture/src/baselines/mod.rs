//! Reference implementations of the classic rule-based caption metrics,
//! sharing one tokenizer so cross-metric comparisons stay controlled.

mod bleu;
mod cider;
mod meteor;
mod rouge;

pub use bleu::bleu;
pub use cider::cider_d;
pub use meteor::meteor;
pub use rouge::rouge_l;

use std::collections::BTreeMap;

use crate::textproc::tokenize;

/// Lowercased tokens for n-gram metrics.
pub(crate) fn gram_tokens(text: &str) -> Vec<String> {
    tokenize(&crate::textproc::normalize(text))
        .into_iter()
        .map(|t| t.lower)
        .collect()
}

/// N-gram counts of one order over a token sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramProfile {
    pub n: usize,
    pub counts: BTreeMap<Vec<String>, usize>,
    pub total: usize,
}

impl NGramProfile {
    pub fn build(tokens: &[String], n: usize) -> Self {
        let mut counts: BTreeMap<Vec<String>, usize> = BTreeMap::new();
        let mut total = 0;
        if n > 0 && tokens.len() >= n {
            for window in tokens.windows(n) {
                *counts.entry(window.to_vec()).or_insert(0) += 1;
                total += 1;
            }
        }
        NGramProfile { n, counts, total }
    }
}
