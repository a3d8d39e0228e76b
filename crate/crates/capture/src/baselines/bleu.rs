use super::{gram_tokens, NGramProfile};

/// BLEU with clipped modified n-gram precision, geometric mean over
/// n = 1..max_n and the closest-reference brevity penalty. Unsmoothed: any
/// zero precision zeroes the score.
pub fn bleu(cand: &str, refs: &[String], max_n: usize) -> f64 {
    assert!(max_n >= 1, "max_n must be at least 1");
    let cand_tokens = gram_tokens(cand);
    if cand_tokens.is_empty() || refs.is_empty() {
        return 0.0;
    }
    let ref_tokens: Vec<Vec<String>> = refs.iter().map(|r| gram_tokens(r)).collect();

    let mut log_sum = 0.0;
    for n in 1..=max_n {
        let cand_profile = NGramProfile::build(&cand_tokens, n);
        if cand_profile.total == 0 {
            return 0.0;
        }
        let ref_profiles: Vec<NGramProfile> = ref_tokens
            .iter()
            .map(|t| NGramProfile::build(t, n))
            .collect();
        let mut clipped = 0usize;
        for (gram, count) in &cand_profile.counts {
            let max_ref = ref_profiles
                .iter()
                .map(|p| p.counts.get(gram).copied().unwrap_or(0))
                .max()
                .unwrap_or(0);
            clipped += (*count).min(max_ref);
        }
        if clipped == 0 {
            return 0.0;
        }
        log_sum += (clipped as f64 / cand_profile.total as f64).ln();
    }

    let c = cand_tokens.len() as f64;
    let r = closest_ref_len(cand_tokens.len(), &ref_tokens) as f64;
    let brevity = if c > r { 1.0 } else { (1.0 - r / c).exp() };
    brevity * (log_sum / max_n as f64).exp()
}

/// Effective reference length: closest to the candidate, ties to shorter.
fn closest_ref_len(cand_len: usize, refs: &[Vec<String>]) -> usize {
    refs.iter()
        .map(Vec::len)
        .min_by_key(|&len| {
            let diff = (len as i64 - cand_len as i64).unsigned_abs();
            (diff, len)
        })
        .unwrap_or(0)
}
