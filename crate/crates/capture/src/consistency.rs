//! Agreement between metric scores and expert scores: Pearson correlation,
//! 1 - R^2, Kendall tau-b over pooled pairs, and the per-sample tau
//! average.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::datamodel::{BenchmarkSample, EvaluationRecord};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("inputs have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {need} paired values, got {got}")]
    TooFew { need: usize, got: usize },
    #[error("zero variance in {side} scores")]
    ZeroVariance { side: &'static str },
    #[error("all values tied on one side; rank correlation undefined")]
    AllTied,
    #[error("no sample has enough distinct scores for a per-sample tau")]
    NoScorableSamples,
    #[error("duplicate (sample, model) pair: ({0}, {1})")]
    DuplicatePair(String, String),
    #[error("sample {0} has fewer than two scored models")]
    SampleTooSmall(String),
    #[error("non-finite score for sample {0}, model {1}")]
    NonFinite(String, String),
    #[error("missing expert scores for: {}", .0.join(", "))]
    MissingExpert(Vec<String>),
}

/// Paired (metric, expert) scores pooled over (sample, model) cells.
#[derive(Debug, Clone)]
pub struct PairedScores {
    entries: Vec<PairedEntry>,
}

#[derive(Debug, Clone)]
pub struct PairedEntry {
    pub sample_id: String,
    pub model_name: String,
    pub metric_score: f64,
    pub expert_score: f64,
}

impl PairedScores {
    /// Validates pairing invariants: unique (sample, model), finite
    /// scores, and at least two models per sample.
    pub fn new(entries: Vec<PairedEntry>) -> Result<Self, StatsError> {
        let mut per_sample: BTreeMap<&str, usize> = BTreeMap::new();
        let mut seen: BTreeMap<(&str, &str), ()> = BTreeMap::new();
        for e in &entries {
            if !e.metric_score.is_finite() || !e.expert_score.is_finite() {
                return Err(StatsError::NonFinite(
                    e.sample_id.clone(),
                    e.model_name.clone(),
                ));
            }
            if seen
                .insert((e.sample_id.as_str(), e.model_name.as_str()), ())
                .is_some()
            {
                return Err(StatsError::DuplicatePair(
                    e.sample_id.clone(),
                    e.model_name.clone(),
                ));
            }
            *per_sample.entry(&e.sample_id).or_insert(0) += 1;
        }
        if let Some((id, _)) = per_sample.iter().find(|(_, n)| **n < 2) {
            return Err(StatsError::SampleTooSmall(id.to_string()));
        }
        Ok(PairedScores { entries })
    }

    pub fn entries(&self) -> &[PairedEntry] {
        &self.entries
    }

    pub fn metric_scores(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.metric_score).collect()
    }

    pub fn expert_scores(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.expert_score).collect()
    }

    fn by_sample(&self) -> BTreeMap<&str, Vec<(f64, f64)>> {
        let mut out: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
        for e in &self.entries {
            out.entry(&e.sample_id)
                .or_default()
                .push((e.metric_score, e.expert_score));
        }
        out
    }
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(StatsError::TooFew {
            need: 2,
            got: xs.len(),
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        cov += (x - mx) * (y - my);
        vx += (x - mx) * (x - mx);
        vy += (y - my) * (y - my);
    }
    if vx == 0.0 {
        return Err(StatsError::ZeroVariance { side: "metric" });
    }
    if vy == 0.0 {
        return Err(StatsError::ZeroVariance { side: "expert" });
    }
    Ok(cov / (vx.sqrt() * vy.sqrt()))
}

/// 1 - R^2 with the metric scores used directly as predictions of the
/// expert scores (no fitted regression), so a mis-scaled metric explodes.
pub fn one_minus_r2(metric_scores: &[f64], expert_scores: &[f64]) -> Result<f64, StatsError> {
    if metric_scores.len() != expert_scores.len() {
        return Err(StatsError::LengthMismatch(
            metric_scores.len(),
            expert_scores.len(),
        ));
    }
    if metric_scores.len() < 2 {
        return Err(StatsError::TooFew {
            need: 2,
            got: metric_scores.len(),
        });
    }
    let n = expert_scores.len() as f64;
    let mean = expert_scores.iter().sum::<f64>() / n;
    let ss_tot: f64 = expert_scores.iter().map(|e| (e - mean) * (e - mean)).sum();
    if ss_tot == 0.0 {
        return Err(StatsError::ZeroVariance { side: "expert" });
    }
    let ss_res: f64 = expert_scores
        .iter()
        .zip(metric_scores)
        .map(|(e, m)| (e - m) * (e - m))
        .sum();
    Ok(ss_res / ss_tot)
}

/// Kendall tau-b (tie-corrected) via sorted tie-run counting and a
/// merge-sort inversion count.
pub fn kendall_tau(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch(xs.len(), ys.len()));
    }
    let n = xs.len();
    if n < 2 {
        return Err(StatsError::TooFew { need: 2, got: n });
    }
    let mut pairs: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    pairs.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));

    let n0 = n * (n - 1) / 2;
    let tie_pairs = |counts: &[usize]| counts.iter().map(|t| t * (t - 1) / 2).sum::<usize>();

    // tie runs in x, and in (x, y) jointly, over the x-sorted order
    let mut x_runs = Vec::new();
    let mut xy_runs = Vec::new();
    let mut xr = 1usize;
    let mut xyr = 1usize;
    for i in 1..n {
        if pairs[i].0 == pairs[i - 1].0 {
            xr += 1;
            if pairs[i].1 == pairs[i - 1].1 {
                xyr += 1;
            } else {
                xy_runs.push(xyr);
                xyr = 1;
            }
        } else {
            x_runs.push(xr);
            xr = 1;
            xy_runs.push(xyr);
            xyr = 1;
        }
    }
    x_runs.push(xr);
    xy_runs.push(xyr);
    let n1 = tie_pairs(&x_runs);
    let n3 = tie_pairs(&xy_runs);

    // discordant swaps: inversions of y within the x-sorted order
    let mut ys_sorted: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let swaps = count_inversions(&mut ys_sorted);

    // tie runs in y
    let mut y_values: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    y_values.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    let mut y_runs = Vec::new();
    let mut yr = 1usize;
    for i in 1..n {
        if y_values[i] == y_values[i - 1] {
            yr += 1;
        } else {
            y_runs.push(yr);
            yr = 1;
        }
    }
    y_runs.push(yr);
    let n2 = tie_pairs(&y_runs);

    if n1 == n0 || n2 == n0 {
        return Err(StatsError::AllTied);
    }
    let concordant_minus_discordant =
        n0 as f64 - n1 as f64 - n2 as f64 + n3 as f64 - 2.0 * swaps as f64;
    let denom = ((n0 - n1) as f64 * (n0 - n2) as f64).sqrt();
    Ok(concordant_minus_discordant / denom)
}

/// Counts inversions while merge-sorting in place. Equal neighbours are
/// not inversions.
fn count_inversions(values: &mut [f64]) -> usize {
    let n = values.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let (left, right) = values.split_at_mut(mid);
    let mut inversions = count_inversions(left) + count_inversions(right);
    let mut merged = Vec::with_capacity(n);
    let (mut i, mut j) = (0, 0);
    while i < left.len() && j < right.len() {
        if left[i] <= right[j] {
            merged.push(left[i]);
            i += 1;
        } else {
            inversions += left.len() - i;
            merged.push(right[j]);
            j += 1;
        }
    }
    merged.extend_from_slice(&left[i..]);
    merged.extend_from_slice(&right[j..]);
    values.copy_from_slice(&merged);
    inversions
}

/// Kendall tau-b within each sample's model scores, averaged over samples.
/// Samples fully tied on either side are skipped.
pub fn sample_tau(paired: &PairedScores) -> Result<f64, StatsError> {
    let mut taus = Vec::new();
    for scores in paired.by_sample().values() {
        let xs: Vec<f64> = scores.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = scores.iter().map(|p| p.1).collect();
        match kendall_tau(&xs, &ys) {
            Ok(tau) => taus.push(tau),
            Err(StatsError::AllTied) => continue,
            Err(e) => return Err(e),
        }
    }
    if taus.is_empty() {
        return Err(StatsError::NoScorableSamples);
    }
    Ok(taus.iter().sum::<f64>() / taus.len() as f64)
}

/// One metric's agreement with the expert scores.
#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    pub metric: String,
    pub pcc: f64,
    pub one_minus_r2: f64,
    pub kendall_tau: f64,
    pub sample_tau: f64,
    pub n_pairs: usize,
    pub n_samples: usize,
}

/// Joins single-metric records with the benchmark's expert scores and
/// computes all four statistics.
pub fn consistency_report(
    metric_records: &[EvaluationRecord],
    benchmark: &[BenchmarkSample],
) -> Result<ConsistencyReport, StatsError> {
    let mut experts: BTreeMap<(&str, &str), f64> = BTreeMap::new();
    for s in benchmark {
        for c in &s.candidates {
            if let Some(score) = c.expert_score {
                experts.insert((s.sample_id.as_str(), c.model_name.as_str()), score);
            }
        }
    }
    let metric = metric_records
        .first()
        .map(|r| r.metric_name.clone())
        .unwrap_or_default();
    let mut entries = Vec::new();
    let mut missing = Vec::new();
    for r in metric_records {
        match experts.get(&(r.sample_id.as_str(), r.model_name.as_str())) {
            Some(expert) => entries.push(PairedEntry {
                sample_id: r.sample_id.clone(),
                model_name: r.model_name.clone(),
                metric_score: r.score,
                expert_score: *expert,
            }),
            None => missing.push(format!("({}, {})", r.sample_id, r.model_name)),
        }
    }
    if !missing.is_empty() {
        return Err(StatsError::MissingExpert(missing));
    }
    let paired = PairedScores::new(entries)?;
    let xs = paired.metric_scores();
    let ys = paired.expert_scores();
    let n_samples = paired.by_sample().len();
    Ok(ConsistencyReport {
        metric,
        pcc: pearson(&xs, &ys)?,
        one_minus_r2: one_minus_r2(&xs, &ys)?,
        kendall_tau: kendall_tau(&xs, &ys)?,
        sample_tau: sample_tau(&paired)?,
        n_pairs: paired.entries().len(),
        n_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pearson_identity_and_reversal() {
        let xs = [1.0, 2.0, 3.0];
        assert_abs_diff_eq!(pearson(&xs, &xs).unwrap(), 1.0, epsilon = 1e-12);
        let ys = [6.0, 4.0, 2.0];
        assert_abs_diff_eq!(pearson(&xs, &ys).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn pearson_hand_value() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [1.0, 3.0, 2.0, 4.0];
        assert_abs_diff_eq!(pearson(&xs, &ys).unwrap(), 0.8, epsilon = 1e-12);
    }

    #[test]
    fn pearson_errors() {
        assert!(matches!(
            pearson(&[1.0], &[1.0]),
            Err(StatsError::TooFew { .. })
        ));
        assert!(matches!(
            pearson(&[1.0, 1.0], &[1.0, 2.0]),
            Err(StatsError::ZeroVariance { .. })
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0]),
            Err(StatsError::LengthMismatch(..))
        ));
    }

    #[test]
    fn one_minus_r2_perfect_prediction() {
        let e = [0.2, 0.5, 0.9];
        assert_abs_diff_eq!(one_minus_r2(&e, &e).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn one_minus_r2_shift_hand_value() {
        let e = [0.2, 0.4, 0.6];
        let m = [0.3, 0.5, 0.7];
        // residual 3 * 0.01; total (0.2-0.4)^2 + 0 + (0.6-0.4)^2 = 0.08
        assert_abs_diff_eq!(one_minus_r2(&m, &e).unwrap(), 0.375, epsilon = 1e-12);
    }

    #[test]
    fn one_minus_r2_is_scale_sensitive() {
        let e = [0.2, 0.4, 0.6, 0.8];
        let m = [0.25, 0.45, 0.55, 0.75];
        let base = one_minus_r2(&m, &e).unwrap();
        let scaled: Vec<f64> = m.iter().map(|v| v * 10.0).collect();
        let blown = one_minus_r2(&scaled, &e).unwrap();
        assert!(blown > base * 100.0);
    }

    #[test]
    fn kendall_trivial_orders() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_abs_diff_eq!(kendall_tau(&xs, &xs).unwrap(), 1.0, epsilon = 1e-12);
        let rev = [4.0, 3.0, 2.0, 1.0];
        assert_abs_diff_eq!(kendall_tau(&xs, &rev).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn kendall_one_third_exactly() {
        let got = kendall_tau(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap();
        assert_eq!(got, 1.0 / 3.0);
    }

    #[test]
    fn kendall_all_tied_errors() {
        assert!(matches!(
            kendall_tau(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(StatsError::AllTied)
        ));
    }

    #[test]
    fn kendall_matches_brute_force_with_ties() {
        let xs = [1.0, 2.0, 2.0, 3.0, 1.0, 4.0];
        let ys = [0.5, 0.5, 1.0, 2.0, 0.0, 1.5];
        let got = kendall_tau(&xs, &ys).unwrap();
        assert_abs_diff_eq!(got, brute_force_tau_b(&xs, &ys), epsilon = 1e-12);
    }

    fn brute_force_tau_b(xs: &[f64], ys: &[f64]) -> f64 {
        use std::cmp::Ordering::Equal;
        let n = xs.len();
        let (mut c, mut d, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
        for i in 0..n {
            for j in i + 1..n {
                let dx = xs[i].partial_cmp(&xs[j]).unwrap();
                let dy = ys[i].partial_cmp(&ys[j]).unwrap();
                match (dx, dy) {
                    (Equal, Equal) => {}
                    (Equal, _) => tx += 1,
                    (_, Equal) => ty += 1,
                    (a, b) if a == b => c += 1,
                    _ => d += 1,
                }
            }
        }
        (c - d) as f64 / (((c + d + tx) as f64) * ((c + d + ty) as f64)).sqrt()
    }

    fn entry(s: &str, m: &str, metric: f64, expert: f64) -> PairedEntry {
        PairedEntry {
            sample_id: s.into(),
            model_name: m.into(),
            metric_score: metric,
            expert_score: expert,
        }
    }

    #[test]
    fn sample_tau_mean_of_extremes() {
        let paired = PairedScores::new(vec![
            entry("s1", "a", 0.1, 0.1),
            entry("s1", "b", 0.2, 0.2),
            entry("s2", "a", 0.1, 0.9),
            entry("s2", "b", 0.2, 0.1),
        ])
        .unwrap();
        assert_abs_diff_eq!(sample_tau(&paired).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn sample_tau_skips_fully_tied_samples() {
        let paired = PairedScores::new(vec![
            entry("s1", "a", 0.5, 0.3),
            entry("s1", "b", 0.5, 0.6),
            entry("s2", "a", 0.1, 0.2),
            entry("s2", "b", 0.3, 0.4),
        ])
        .unwrap();
        assert_abs_diff_eq!(sample_tau(&paired).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn sample_tau_equals_pooled_tau_for_single_sample() {
        let paired = PairedScores::new(vec![
            entry("s1", "a", 0.1, 0.15),
            entry("s1", "b", 0.5, 0.3),
            entry("s1", "c", 0.3, 0.6),
        ])
        .unwrap();
        let pooled = kendall_tau(&paired.metric_scores(), &paired.expert_scores()).unwrap();
        assert_abs_diff_eq!(sample_tau(&paired).unwrap(), pooled, epsilon = 1e-12);
    }

    #[test]
    fn sample_tau_no_scorable_samples_errors() {
        let paired = PairedScores::new(vec![
            entry("s1", "a", 0.5, 0.3),
            entry("s1", "b", 0.5, 0.6),
        ])
        .unwrap();
        assert!(matches!(
            sample_tau(&paired),
            Err(StatsError::NoScorableSamples)
        ));
    }

    #[test]
    fn paired_scores_invariants() {
        assert!(matches!(
            PairedScores::new(vec![
                entry("s1", "a", 0.1, 0.2),
                entry("s1", "a", 0.3, 0.4),
                entry("s1", "b", 0.3, 0.4),
            ]),
            Err(StatsError::DuplicatePair(..))
        ));
        assert!(matches!(
            PairedScores::new(vec![entry("s1", "a", 0.1, 0.2)]),
            Err(StatsError::SampleTooSmall(..))
        ));
        assert!(matches!(
            PairedScores::new(vec![
                entry("s1", "a", f64::NAN, 0.2),
                entry("s1", "b", 0.1, 0.2),
            ]),
            Err(StatsError::NonFinite(..))
        ));
    }

    #[test]
    fn pearson_invariant_under_positive_affine_transforms() {
        let xs = [0.1, 0.5, 0.3, 0.9, 0.7];
        let ys = [0.2, 0.4, 0.35, 0.8, 0.6];
        let base = pearson(&xs, &ys).unwrap();
        let scaled: Vec<f64> = xs.iter().map(|x| 3.5 * x + 2.0).collect();
        assert_abs_diff_eq!(pearson(&scaled, &ys).unwrap(), base, epsilon = 1e-12);
        let shifted: Vec<f64> = ys.iter().map(|y| 0.25 * y - 7.0).collect();
        assert_abs_diff_eq!(pearson(&xs, &shifted).unwrap(), base, epsilon = 1e-12);
    }

    #[test]
    fn kendall_invariant_under_monotone_transforms() {
        let xs = [0.1, 0.5, 0.3, 0.9, 0.7, 0.5];
        let ys = [0.2, 0.4, 0.35, 0.8, 0.6, 0.4];
        let base = kendall_tau(&xs, &ys).unwrap();
        let cubed: Vec<f64> = xs.iter().map(|x| x.powi(3)).collect();
        assert_abs_diff_eq!(kendall_tau(&cubed, &ys).unwrap(), base, epsilon = 1e-12);
        let exped: Vec<f64> = ys.iter().map(|y| y.exp()).collect();
        assert_abs_diff_eq!(kendall_tau(&xs, &exped).unwrap(), base, epsilon = 1e-12);
    }

    fn report_fixture(metric_of: impl Fn(f64) -> f64) -> ConsistencyReport {
        use crate::datamodel::{BenchmarkSample, CandidateEntry};
        let experts = [[0.9, 0.5, 0.1], [0.8, 0.6, 0.2], [0.7, 0.4, 0.3]];
        let mut samples = Vec::new();
        let mut records = Vec::new();
        for (i, row) in experts.iter().enumerate() {
            let sample_id = format!("s{i}");
            let candidates: Vec<CandidateEntry> = row
                .iter()
                .enumerate()
                .map(|(j, e)| CandidateEntry {
                    model_name: format!("m{j}"),
                    caption: "a dog".into(),
                    expert_score: Some(*e),
                })
                .collect();
            for (j, e) in row.iter().enumerate() {
                records.push(EvaluationRecord {
                    sample_id: sample_id.clone(),
                    model_name: format!("m{j}"),
                    metric_name: "bleu".into(),
                    score: metric_of(*e),
                    sub_scores: Default::default(),
                });
            }
            samples.push(BenchmarkSample {
                sample_id,
                image_ref: None,
                references: vec!["a dog".into()],
                candidates,
            });
        }
        consistency_report(&records, &samples).unwrap()
    }

    #[test]
    fn report_on_identical_scores() {
        let r = report_fixture(|e| e);
        assert_abs_diff_eq!(r.pcc, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.one_minus_r2, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.kendall_tau, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.sample_tau, 1.0, epsilon = 1e-12);
        assert_eq!((r.n_pairs, r.n_samples), (9, 3));
    }

    #[test]
    fn report_on_anticorrelated_scores() {
        let r = report_fixture(|e| 1.0 - e);
        assert_abs_diff_eq!(r.pcc, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.kendall_tau, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.sample_tau, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn report_lists_missing_expert_keys() {
        use crate::datamodel::{BenchmarkSample, CandidateEntry};
        let samples = vec![BenchmarkSample {
            sample_id: "s0".into(),
            image_ref: None,
            references: vec!["a dog".into()],
            candidates: vec![CandidateEntry {
                model_name: "m0".into(),
                caption: "a dog".into(),
                expert_score: None,
            }],
        }];
        let records = vec![EvaluationRecord {
            sample_id: "s0".into(),
            model_name: "m0".into(),
            metric_name: "bleu".into(),
            score: 0.5,
            sub_scores: Default::default(),
        }];
        let err = consistency_report(&records, &samples).unwrap_err();
        assert!(err.to_string().contains("(s0, m0)"), "{err}");
    }

    #[test]
    fn statistics_are_order_independent() {
        let fwd = PairedScores::new(vec![
            entry("s1", "a", 0.1, 0.2),
            entry("s1", "b", 0.4, 0.5),
            entry("s2", "a", 0.7, 0.6),
            entry("s2", "b", 0.2, 0.25),
        ])
        .unwrap();
        let rev = PairedScores::new(fwd.entries().iter().rev().cloned().collect()).unwrap();
        assert_eq!(sample_tau(&fwd).unwrap(), sample_tau(&rev).unwrap());
        let tf = kendall_tau(&fwd.metric_scores(), &fwd.expert_scores()).unwrap();
        let tr = kendall_tau(&rev.metric_scores(), &rev.expert_scores()).unwrap();
        assert_abs_diff_eq!(tf, tr, epsilon = 1e-12);
    }
}
