use super::gram_tokens;
use crate::lexicon::{LexiconStore, WordNetPos};
use crate::textproc::porter_stem;

const ALPHA: f64 = 0.9;
const BETA: f64 = 3.0;
const GAMMA: f64 = 0.5;

/// METEOR: greedy unigram alignment through exact, stem and synonym
/// stages, harmonic F-mean weighted toward recall, and a chunk-based
/// fragmentation penalty. The best reference wins.
pub fn meteor(cand: &str, refs: &[String], lexicon: &LexiconStore) -> f64 {
    let cand_tokens = gram_tokens(cand);
    if cand_tokens.is_empty() {
        return 0.0;
    }
    refs.iter()
        .map(|r| meteor_single(&cand_tokens, &gram_tokens(r), lexicon))
        .fold(0.0, f64::max)
}

fn meteor_single(cand: &[String], reference: &[String], lexicon: &LexiconStore) -> f64 {
    if reference.is_empty() {
        return 0.0;
    }
    let pairs = align(cand, reference, lexicon);
    let matches = pairs.len() as f64;
    if pairs.is_empty() {
        return 0.0;
    }
    let precision = matches / cand.len() as f64;
    let recall = matches / reference.len() as f64;
    let f_mean = precision * recall / (ALPHA * precision + (1.0 - ALPHA) * recall);
    let penalty = GAMMA * (chunks(&pairs) as f64 / matches).powf(BETA);
    f_mean * (1.0 - penalty)
}

/// Greedy left-to-right alignment, one stage at a time: exact, then Porter
/// stem, then synonym overlap. Returns (cand index, ref index) pairs.
fn align(cand: &[String], reference: &[String], lexicon: &LexiconStore) -> Vec<(usize, usize)> {
    let mut cand_used = vec![false; cand.len()];
    let mut ref_used = vec![false; reference.len()];
    let mut pairs = Vec::new();

    let run_stage = |matches: &dyn Fn(&str, &str) -> bool,
                         pairs: &mut Vec<(usize, usize)>,
                         cand_used: &mut Vec<bool>,
                         ref_used: &mut Vec<bool>| {
        for (i, c) in cand.iter().enumerate() {
            if cand_used[i] {
                continue;
            }
            for (j, r) in reference.iter().enumerate() {
                if ref_used[j] || !matches(c, r) {
                    continue;
                }
                cand_used[i] = true;
                ref_used[j] = true;
                pairs.push((i, j));
                break;
            }
        }
    };

    run_stage(&|c, r| c == r, &mut pairs, &mut cand_used, &mut ref_used);
    run_stage(
        &|c, r| porter_stem(c) == porter_stem(r),
        &mut pairs,
        &mut cand_used,
        &mut ref_used,
    );
    run_stage(
        &|c, r| {
            WordNetPos::ALL
                .into_iter()
                .any(|pos| c != r && lexicon.synonyms_overlap(c, r, pos))
        },
        &mut pairs,
        &mut cand_used,
        &mut ref_used,
    );

    pairs.sort_unstable();
    pairs
}

/// Number of maximal runs of adjacent matches (adjacent on both sides).
fn chunks(pairs: &[(usize, usize)]) -> usize {
    let mut count = 0;
    let mut prev: Option<(usize, usize)> = None;
    for &(ci, rj) in pairs {
        let contiguous = prev.is_some_and(|(pc, pr)| ci == pc + 1 && rj == pr + 1);
        if !contiguous {
            count += 1;
        }
        prev = Some((ci, rj));
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn lexicon() -> LexiconStore {
        LexiconStore::bundled()
    }

    fn one(s: &str) -> Vec<String> {
        vec![s.to_string()]
    }

    #[test]
    fn identical_caption_hand_value() {
        // matches 3, chunks 1: penalty = 0.5 * (1/3)^3 = 1/54
        let got = meteor("a red car", &one("a red car"), &lexicon());
        assert_abs_diff_eq!(got, 53.0 / 54.0, epsilon = 1e-9);
    }

    #[test]
    fn unrelated_captions_score_zero() {
        assert_eq!(meteor("x y z", &one("p q r"), &lexicon()), 0.0);
    }

    #[test]
    fn synonym_stage_adds_matches() {
        let lex = lexicon();
        // "photo"/"picture" only align through the synonym stage
        let with_syn = meteor("photo of dog", &one("picture of dog"), &lex);
        let without = meteor("zzz of dog", &one("picture of dog"), &lex);
        assert!(with_syn > without);
        // all three unigrams align positionally, one contiguous chunk
        assert_abs_diff_eq!(with_syn, 53.0 / 54.0, epsilon = 1e-9);
    }

    #[test]
    fn stem_stage_matches_inflections() {
        let lex = lexicon();
        // "running"/"runs" share the stem "run"
        let got = meteor("dog running", &one("dog runs"), &lex);
        assert!(got > 0.9, "stem match should align both unigrams, got {got}");
    }

    #[test]
    fn multi_reference_takes_max() {
        let lex = lexicon();
        let refs = vec!["p q r".to_string(), "a red car".to_string()];
        let direct = meteor("a red car", &refs, &lex);
        assert_abs_diff_eq!(direct, 53.0 / 54.0, epsilon = 1e-9);
        let reversed: Vec<String> = refs.iter().rev().cloned().collect();
        assert_eq!(direct, meteor("a red car", &reversed, &lex));
    }

    #[test]
    fn chunk_counting() {
        assert_eq!(chunks(&[(0, 0), (1, 1), (2, 2)]), 1);
        assert_eq!(chunks(&[(0, 2), (1, 0), (2, 1)]), 2);
        assert_eq!(chunks(&[(0, 0), (1, 1), (3, 5)]), 2);
        assert_eq!(chunks(&[]), 0);
    }
}
