use super::gram_tokens;

const BETA: f64 = 1.2;

/// ROUGE-L: longest-common-subsequence F-measure with recall weighted by
/// beta = 1.2; the best reference wins.
pub fn rouge_l(cand: &str, refs: &[String]) -> f64 {
    let cand_tokens = gram_tokens(cand);
    if cand_tokens.is_empty() {
        return 0.0;
    }
    refs.iter()
        .map(|r| {
            let ref_tokens = gram_tokens(r);
            if ref_tokens.is_empty() {
                return 0.0;
            }
            let lcs = lcs_len(&cand_tokens, &ref_tokens) as f64;
            if lcs == 0.0 {
                return 0.0;
            }
            let precision = lcs / cand_tokens.len() as f64;
            let recall = lcs / ref_tokens.len() as f64;
            let b2 = BETA * BETA;
            (1.0 + b2) * precision * recall / (recall + b2 * precision)
        })
        .fold(0.0, f64::max)
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            row[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(row[j])
            };
        }
        std::mem::swap(&mut prev, &mut row);
    }
    prev[b.len()]
}
