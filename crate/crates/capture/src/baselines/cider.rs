use std::collections::BTreeMap;

use super::{gram_tokens, NGramProfile};

const MAX_N: usize = 4;
const SIGMA: f64 = 6.0;

/// CIDEr-D over a corpus: per-order TF-IDF cosine with count clipping and
/// a Gaussian length penalty, averaged over n = 1..4 and references, then
/// scaled by 10. Document frequencies come from the reference sets, so a
/// single-sample corpus degenerates to zero everywhere.
pub fn cider_d(
    cands_by_sample: &BTreeMap<String, String>,
    refs_by_sample: &BTreeMap<String, Vec<String>>,
) -> BTreeMap<String, f64> {
    let n_samples = refs_by_sample.len();
    let log_corpus = (n_samples.max(1)) as f64;
    let log_corpus = log_corpus.ln();

    // document frequency: each distinct n-gram counted once per sample's
    // reference set
    let mut df: BTreeMap<Vec<String>, usize> = BTreeMap::new();
    for refs in refs_by_sample.values() {
        let mut seen: BTreeMap<Vec<String>, ()> = BTreeMap::new();
        for r in refs {
            let tokens = gram_tokens(r);
            for n in 1..=MAX_N {
                for gram in NGramProfile::build(&tokens, n).counts.keys() {
                    seen.entry(gram.clone()).or_insert(());
                }
            }
        }
        for gram in seen.keys() {
            *df.entry(gram.clone()).or_insert(0) += 1;
        }
    }
    let idf = |gram: &Vec<String>| -> f64 {
        let d = df.get(gram).copied().unwrap_or(0).max(1) as f64;
        log_corpus - d.ln()
    };

    let mut scores = BTreeMap::new();
    for (sample_id, cand) in cands_by_sample {
        let Some(refs) = refs_by_sample.get(sample_id) else {
            continue;
        };
        let cand_tokens = gram_tokens(cand);
        let mut per_n_total = [0.0; MAX_N];
        for r in refs {
            let ref_tokens = gram_tokens(r);
            let delta = cand_tokens.len() as f64 - ref_tokens.len() as f64;
            let penalty = (-(delta * delta) / (2.0 * SIGMA * SIGMA)).exp();
            for n in 1..=MAX_N {
                let c = NGramProfile::build(&cand_tokens, n);
                let g = NGramProfile::build(&ref_tokens, n);
                per_n_total[n - 1] += penalty * clipped_cosine(&c, &g, &idf);
            }
        }
        let denom = (refs.len().max(1) * MAX_N) as f64;
        scores.insert(
            sample_id.clone(),
            10.0 * per_n_total.iter().sum::<f64>() / denom,
        );
    }
    scores
}

/// Cosine of TF-IDF vectors with the candidate counts clipped to the
/// reference counts.
fn clipped_cosine(
    cand: &NGramProfile,
    reference: &NGramProfile,
    idf: &dyn Fn(&Vec<String>) -> f64,
) -> f64 {
    let weight = |profile: &NGramProfile, gram: &Vec<String>| {
        profile.counts.get(gram).copied().unwrap_or(0) as f64 * idf(gram)
    };
    let norm = |profile: &NGramProfile| {
        profile
            .counts
            .keys()
            .map(|g| weight(profile, g).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let nc = norm(cand);
    let ng = norm(reference);
    if nc == 0.0 || ng == 0.0 {
        return 0.0;
    }
    let mut dot = 0.0;
    for gram in cand.counts.keys() {
        let wc = weight(cand, gram);
        let wg = weight(reference, gram);
        dot += wc.min(wg) * wg;
    }
    dot / (nc * ng)
}
