//! Three-stage element matching (exact, synonym, soft) and the weighted
//! per-type F1 combination, plus the batch dataset evaluator.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::lexicon::{EmbeddingError, EmbeddingProvider, LexiconStore, WordNetPos};
use crate::scenegraph::{CaptionParser, ElementSets, SceneGraph};

#[derive(Debug, Error)]
pub enum MatchError {
    #[error("weights must be non-negative with a positive sum, got {0:?}")]
    InvalidWeights((f64, f64, f64)),
    #[error("empty comparison: no weighted element type is present on either side")]
    EmptyComparison,
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

/// Scale factors for the object, attribute and relation F1 scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for MatchWeights {
    fn default() -> Self {
        MatchWeights {
            alpha: 5.0,
            beta: 5.0,
            gamma: 2.0,
        }
    }
}

impl MatchWeights {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self, MatchError> {
        let w = MatchWeights { alpha, beta, gamma };
        if !(alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0) || alpha + beta + gamma <= 0.0 {
            return Err(MatchError::InvalidWeights((alpha, beta, gamma)));
        }
        Ok(w)
    }

    fn weight(&self, t: ElementType) -> f64 {
        match t {
            ElementType::Object => self.alpha,
            ElementType::Attribute => self.beta,
            ElementType::Relation => self.gamma,
        }
    }

    /// Weighted mean of the supplied per-type F1 scores; types absent on
    /// both sides pass `None` and drop out of the normalization.
    pub fn combine(&self, f1: [Option<f64>; 3]) -> Option<f64> {
        let mut num = 0.0;
        let mut den = 0.0;
        for (t, f) in ElementType::ALL.into_iter().zip(f1) {
            if let Some(f) = f {
                num += self.weight(t) * f;
                den += self.weight(t);
            }
        }
        (den > 0.0).then(|| num / den)
    }
}

/// How the soft scores of leftover elements enter precision and recall:
/// added up, or averaged over the leftovers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SoftAggregation {
    #[default]
    Sum,
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ElementType {
    Object,
    Attribute,
    Relation,
}

impl ElementType {
    pub const ALL: [ElementType; 3] = [
        ElementType::Object,
        ElementType::Attribute,
        ElementType::Relation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ElementType::Object => "object",
            ElementType::Attribute => "attribute",
            ElementType::Relation => "relation",
        }
    }
}

/// Matching outcome for one element type.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TypeMatchResult {
    pub cand_total: usize,
    pub gt_total: usize,
    pub cand_matched: usize,
    pub gt_matched: usize,
    /// Row maxima of the similarity matrix, one per unmatched candidate.
    pub cand_soft: Vec<f64>,
    /// Column maxima, one per unmatched reference element.
    pub gt_soft: Vec<f64>,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl TypeMatchResult {
    /// A type participates in scoring when either side has elements.
    pub fn is_active(&self) -> bool {
        self.cand_total > 0 || self.gt_total > 0
    }
}

/// Full scoring outcome for one candidate caption.
#[derive(Debug, Clone)]
pub struct CaptureResult {
    pub object: TypeMatchResult,
    pub attribute: TypeMatchResult,
    pub relation: TypeMatchResult,
    pub score: f64,
}

impl CaptureResult {
    pub fn by_type(&self, t: ElementType) -> &TypeMatchResult {
        match t {
            ElementType::Object => &self.object,
            ElementType::Attribute => &self.attribute,
            ElementType::Relation => &self.relation,
        }
    }

    pub fn types_active(&self) -> Vec<ElementType> {
        ElementType::ALL
            .into_iter()
            .filter(|t| self.by_type(*t).is_active())
            .collect()
    }
}

/// Flattens one element type of a graph into sorted, deduplicated phrase
/// strings: objects as lemmas, attributes as "attr obj" bigrams, relations
/// as "subj pred obj" phrases.
pub fn flatten_elements(sets: &ElementSets, element_type: ElementType) -> Vec<String> {
    let phrases: BTreeSet<String> = match element_type {
        ElementType::Object => sets.objects.iter().cloned().collect(),
        ElementType::Attribute => sets
            .attributes
            .iter()
            .map(|(obj, attr)| format!("{attr} {obj}"))
            .collect(),
        ElementType::Relation => sets
            .relations
            .iter()
            .map(|(s, p, o)| format!("{s} {p} {o}"))
            .collect(),
    };
    phrases.into_iter().collect()
}

/// String-equality matching over deduplicated phrase sets; returns the
/// matched subset of each side (the intersection, in both orders).
pub fn exact_match(cand: &[String], reference: &[String]) -> (BTreeSet<String>, BTreeSet<String>) {
    let c: BTreeSet<&String> = cand.iter().collect();
    let r: BTreeSet<&String> = reference.iter().collect();
    let matched: BTreeSet<String> = c.intersection(&r).map(|s| (*s).clone()).collect();
    (matched.clone(), matched)
}

/// Word position determines the part of speech used for synset lookups.
fn word_pos(element_type: ElementType, index: usize, len: usize) -> WordNetPos {
    match element_type {
        ElementType::Object => WordNetPos::Noun,
        ElementType::Attribute => {
            if index + 1 == len {
                WordNetPos::Noun
            } else {
                WordNetPos::Adj
            }
        }
        ElementType::Relation => {
            if index == 0 || index + 1 == len {
                WordNetPos::Noun
            } else {
                WordNetPos::Verb
            }
        }
    }
}

fn phrases_synonymous(
    a: &str,
    b: &str,
    lexicon: &LexiconStore,
    element_type: ElementType,
) -> bool {
    let wa: Vec<&str> = a.split_whitespace().collect();
    let wb: Vec<&str> = b.split_whitespace().collect();
    if wa.len() != wb.len() {
        return false;
    }
    wa.iter().zip(&wb).enumerate().all(|(i, (x, y))| {
        x == y || lexicon.synonyms_overlap(x, y, word_pos(element_type, i, wa.len()))
    })
}

/// Synonym-overlap matching over the exact-stage leftovers. Single-word
/// phrases match when their synonym sets overlap; multiword phrases match
/// when equal in length with every aligned pair equal or overlapping.
pub fn synonym_match(
    cand_rm: &[String],
    ref_rm: &[String],
    lexicon: &LexiconStore,
    element_type: ElementType,
) -> (BTreeSet<String>, BTreeSet<String>) {
    let cand_matched: BTreeSet<String> = cand_rm
        .iter()
        .filter(|c| {
            ref_rm
                .iter()
                .any(|r| phrases_synonymous(c, r, lexicon, element_type))
        })
        .cloned()
        .collect();
    let ref_matched: BTreeSet<String> = ref_rm
        .iter()
        .filter(|r| {
            cand_rm
                .iter()
                .any(|c| phrases_synonymous(c, r, lexicon, element_type))
        })
        .cloned()
        .collect();
    (cand_matched, ref_matched)
}

/// Embedding-cosine soft matching over the remaining unmatched phrases.
/// Returns per-candidate row maxima and per-reference column maxima,
/// clamped to [0, 1]; an empty opposite side yields zeros.
pub fn soft_match(
    cand_rm: &[String],
    ref_rm: &[String],
    embedder: &dyn EmbeddingProvider,
) -> Result<(Vec<f64>, Vec<f64>), EmbeddingError> {
    let mut cand_soft = vec![0.0; cand_rm.len()];
    let mut gt_soft = vec![0.0; ref_rm.len()];
    if cand_rm.is_empty() || ref_rm.is_empty() {
        return Ok((cand_soft, gt_soft));
    }
    let dim = embedder.dimension();
    let cand_vecs = embedder.embed_batch(cand_rm)?;
    let ref_vecs = embedder.embed_batch(ref_rm)?;
    for v in cand_vecs.iter().chain(&ref_vecs) {
        if v.len() != dim {
            return Err(EmbeddingError::Dimension {
                got: v.len(),
                expected: dim,
            });
        }
    }
    for (i, cv) in cand_vecs.iter().enumerate() {
        for (j, rv) in ref_vecs.iter().enumerate() {
            let sim = crate::lexicon::cosine(cv, rv).clamp(0.0, 1.0);
            if sim > cand_soft[i] {
                cand_soft[i] = sim;
            }
            if sim > gt_soft[j] {
                gt_soft[j] = sim;
            }
        }
    }
    Ok((cand_soft, gt_soft))
}

/// Scoring configuration for the matcher.
#[derive(Debug, Clone, Copy)]
pub struct MatchConfig {
    pub weights: MatchWeights,
    pub soft_matching: bool,
    pub soft_aggregation: SoftAggregation,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            weights: MatchWeights::default(),
            soft_matching: true,
            soft_aggregation: SoftAggregation::Sum,
        }
    }
}

fn soft_credit(soft: &[f64], agg: SoftAggregation) -> f64 {
    if soft.is_empty() {
        return 0.0;
    }
    let sum: f64 = soft.iter().sum();
    match agg {
        SoftAggregation::Sum => sum,
        SoftAggregation::Mean => sum / soft.len() as f64,
    }
}

/// Runs the three stages over one element type and computes P/R/F1.
pub fn score_type(
    cand: &[String],
    reference: &[String],
    lexicon: &LexiconStore,
    embedder: Option<&dyn EmbeddingProvider>,
    element_type: ElementType,
    config: &MatchConfig,
) -> Result<TypeMatchResult, MatchError> {
    let cand_set: Vec<String> = cand.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let ref_set: Vec<String> = reference
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let cand_total = cand_set.len();
    let gt_total = ref_set.len();

    let (exact_c, exact_r) = exact_match(&cand_set, &ref_set);
    let cand_rm: Vec<String> = cand_set
        .iter()
        .filter(|p| !exact_c.contains(*p))
        .cloned()
        .collect();
    let ref_rm: Vec<String> = ref_set
        .iter()
        .filter(|p| !exact_r.contains(*p))
        .cloned()
        .collect();

    let (syn_c, syn_r) = synonym_match(&cand_rm, &ref_rm, lexicon, element_type);
    let cand_left: Vec<String> = cand_rm
        .iter()
        .filter(|p| !syn_c.contains(*p))
        .cloned()
        .collect();
    let ref_left: Vec<String> = ref_rm
        .iter()
        .filter(|p| !syn_r.contains(*p))
        .cloned()
        .collect();

    let cand_matched = exact_c.len() + syn_c.len();
    let gt_matched = exact_r.len() + syn_r.len();

    let (cand_soft, gt_soft) = match (config.soft_matching, embedder) {
        (true, Some(e)) => soft_match(&cand_left, &ref_left, e)?,
        _ => (vec![0.0; cand_left.len()], vec![0.0; ref_left.len()]),
    };

    let precision = if cand_total > 0 {
        (cand_matched as f64 + soft_credit(&cand_soft, config.soft_aggregation))
            / cand_total as f64
    } else {
        0.0
    };
    let recall = if gt_total > 0 {
        (gt_matched as f64 + soft_credit(&gt_soft, config.soft_aggregation)) / gt_total as f64
    } else {
        0.0
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };

    Ok(TypeMatchResult {
        cand_total,
        gt_total,
        cand_matched,
        gt_matched,
        cand_soft,
        gt_soft,
        precision,
        recall,
        f1,
    })
}

/// Scorer bundling the lexical resources and configuration.
pub struct CaptureScorer {
    lexicon: Arc<LexiconStore>,
    embedder: Option<Arc<dyn EmbeddingProvider>>,
    config: MatchConfig,
}

impl CaptureScorer {
    pub fn new(
        lexicon: Arc<LexiconStore>,
        embedder: Option<Arc<dyn EmbeddingProvider>>,
        config: MatchConfig,
    ) -> Self {
        CaptureScorer {
            lexicon,
            embedder,
            config,
        }
    }

    pub fn config(&self) -> &MatchConfig {
        &self.config
    }

    /// Scores a candidate graph against reference graphs. References are
    /// union-merged into one element set before matching.
    pub fn score_graphs(
        &self,
        cand: &SceneGraph,
        references: &[SceneGraph],
    ) -> Result<CaptureResult, MatchError> {
        let merged_ref = references
            .iter()
            .fold(ElementSets::default(), |acc, g| acc.merge(&g.elements));
        self.score_elements(&cand.elements, &merged_ref)
    }

    pub fn score_elements(
        &self,
        cand: &ElementSets,
        reference: &ElementSets,
    ) -> Result<CaptureResult, MatchError> {
        let embedder = self.embedder.as_deref();
        let mut results = Vec::with_capacity(3);
        for t in ElementType::ALL {
            let c = flatten_elements(cand, t);
            let r = flatten_elements(reference, t);
            results.push(score_type(
                &c,
                &r,
                &self.lexicon,
                embedder,
                t,
                &self.config,
            )?);
        }
        let f1: Vec<Option<f64>> = results
            .iter()
            .map(|r| r.is_active().then_some(r.f1))
            .collect();
        let score = self
            .config
            .weights
            .combine([f1[0], f1[1], f1[2]])
            .ok_or(MatchError::EmptyComparison)?;
        let mut it = results.into_iter();
        Ok(CaptureResult {
            object: it.next().unwrap(),
            attribute: it.next().unwrap(),
            relation: it.next().unwrap(),
            score,
        })
    }

    /// Parses caption texts and scores candidate against references.
    pub fn score_captions(
        &self,
        parser: &CaptionParser,
        candidate: &str,
        references: &[String],
    ) -> Result<CaptureResult, MatchError> {
        let cand = parser.parse_caption(candidate);
        let refs: Vec<SceneGraph> = references
            .iter()
            .map(|r| parser.parse_caption(r))
            .collect();
        self.score_graphs(&cand, &refs)
    }
}

/// Metric identifiers accepted by the dataset evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MetricKind {
    Capture,
    Bleu,
    RougeL,
    CiderD,
    Meteor,
}

impl MetricKind {
    pub const ALL: [MetricKind; 5] = [
        MetricKind::Capture,
        MetricKind::Bleu,
        MetricKind::RougeL,
        MetricKind::CiderD,
        MetricKind::Meteor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Capture => "capture",
            MetricKind::Bleu => "bleu",
            MetricKind::RougeL => "rouge_l",
            MetricKind::CiderD => "cider_d",
            MetricKind::Meteor => "meteor",
        }
    }
}

impl std::str::FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "capture" => Ok(MetricKind::Capture),
            "bleu" | "bleu_2" | "bleu-2" => Ok(MetricKind::Bleu),
            "rouge_l" | "rouge-l" | "rouge" => Ok(MetricKind::RougeL),
            "cider_d" | "cider-d" | "cider" => Ok(MetricKind::CiderD),
            "meteor" => Ok(MetricKind::Meteor),
            other => Err(format!(
                "unknown metric {other:?}; expected capture, bleu, rouge_l, cider_d or meteor"
            )),
        }
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("sample {sample_id}, model {model}: {source}")]
    Sample {
        sample_id: String,
        model: String,
        source: MatchError,
    },
}

/// Per-candidate scoring shared by the parallel and sequential paths.
/// CIDEr-D is corpus-level and handled separately.
fn score_sample(
    sample: &crate::datamodel::BenchmarkSample,
    parser: &CaptionParser,
    scorer: &CaptureScorer,
    metrics: &[MetricKind],
    skip_errors: bool,
) -> Result<Vec<crate::datamodel::EvaluationRecord>, EvalError> {
    use crate::baselines;
    use crate::datamodel::EvaluationRecord;
    use std::collections::BTreeMap;

    let mut records = Vec::new();
    let want_capture = metrics.contains(&MetricKind::Capture);
    let ref_graphs: Vec<SceneGraph> = if want_capture {
        sample
            .references
            .iter()
            .map(|r| parser.parse_caption(r))
            .collect()
    } else {
        Vec::new()
    };
    for candidate in &sample.candidates {
        for metric in metrics {
            let record = |score: f64, sub: BTreeMap<String, f64>| EvaluationRecord {
                sample_id: sample.sample_id.clone(),
                model_name: candidate.model_name.clone(),
                metric_name: metric.name().to_string(),
                score,
                sub_scores: sub,
            };
            match metric {
                MetricKind::Capture => {
                    let cand_graph = parser.parse_caption(&candidate.caption);
                    match scorer.score_graphs(&cand_graph, &ref_graphs) {
                        Ok(result) => {
                            let mut sub = BTreeMap::new();
                            for t in ElementType::ALL {
                                let r = result.by_type(t);
                                sub.insert(format!("precision_{}", t.name()), r.precision);
                                sub.insert(format!("recall_{}", t.name()), r.recall);
                                sub.insert(format!("f1_{}", t.name()), r.f1);
                            }
                            records.push(record(result.score, sub));
                        }
                        Err(source) if skip_errors => {
                            let _ = source;
                        }
                        Err(source) => {
                            return Err(EvalError::Sample {
                                sample_id: sample.sample_id.clone(),
                                model: candidate.model_name.clone(),
                                source,
                            })
                        }
                    }
                }
                MetricKind::Bleu => {
                    let score = baselines::bleu(&candidate.caption, &sample.references, 2);
                    records.push(record(score, BTreeMap::new()));
                }
                MetricKind::RougeL => {
                    let score = baselines::rouge_l(&candidate.caption, &sample.references);
                    records.push(record(score, BTreeMap::new()));
                }
                MetricKind::Meteor => {
                    let score = baselines::meteor(
                        &candidate.caption,
                        &sample.references,
                        scorer.lexicon.as_ref(),
                    );
                    records.push(record(score, BTreeMap::new()));
                }
                MetricKind::CiderD => {} // corpus pass below
            }
        }
    }
    Ok(records)
}

fn cider_records(
    samples: &[crate::datamodel::BenchmarkSample],
) -> Vec<crate::datamodel::EvaluationRecord> {
    use std::collections::BTreeMap;

    let refs_by_sample: BTreeMap<String, Vec<String>> = samples
        .iter()
        .map(|s| (s.sample_id.clone(), s.references.clone()))
        .collect();
    let models: std::collections::BTreeSet<String> = samples
        .iter()
        .flat_map(|s| s.candidates.iter().map(|c| c.model_name.clone()))
        .collect();
    let mut records = Vec::new();
    for model in models {
        let cands: BTreeMap<String, String> = samples
            .iter()
            .filter_map(|s| {
                s.candidates
                    .iter()
                    .find(|c| c.model_name == model)
                    .map(|c| (s.sample_id.clone(), c.caption.clone()))
            })
            .collect();
        for (sample_id, score) in crate::baselines::cider_d(&cands, &refs_by_sample) {
            records.push(crate::datamodel::EvaluationRecord {
                sample_id,
                model_name: model.clone(),
                metric_name: MetricKind::CiderD.name().to_string(),
                score,
                sub_scores: BTreeMap::new(),
            });
        }
    }
    records
}

/// Evaluates every (sample, candidate) cell under the selected metrics.
/// Records come back sorted by (sample, model, metric) so output is
/// deterministic regardless of the execution order.
#[cfg(feature = "parallel")]
pub fn evaluate_dataset(
    samples: &[crate::datamodel::BenchmarkSample],
    parser: &CaptionParser,
    scorer: &CaptureScorer,
    metrics: &[MetricKind],
    skip_errors: bool,
) -> Result<Vec<crate::datamodel::EvaluationRecord>, EvalError> {
    use rayon::prelude::*;
    let per_sample: Result<Vec<_>, EvalError> = samples
        .par_iter()
        .map(|s| score_sample(s, parser, scorer, metrics, skip_errors))
        .collect();
    finish_records(per_sample?, samples, metrics)
}

/// Sequential fallback compiled when the `parallel` feature is off.
#[cfg(not(feature = "parallel"))]
pub fn evaluate_dataset(
    samples: &[crate::datamodel::BenchmarkSample],
    parser: &CaptionParser,
    scorer: &CaptureScorer,
    metrics: &[MetricKind],
    skip_errors: bool,
) -> Result<Vec<crate::datamodel::EvaluationRecord>, EvalError> {
    evaluate_dataset_seq(samples, parser, scorer, metrics, skip_errors)
}

/// Single-threaded evaluation; the benchmark suite compares this against
/// the rayon path.
pub fn evaluate_dataset_seq(
    samples: &[crate::datamodel::BenchmarkSample],
    parser: &CaptionParser,
    scorer: &CaptureScorer,
    metrics: &[MetricKind],
    skip_errors: bool,
) -> Result<Vec<crate::datamodel::EvaluationRecord>, EvalError> {
    let per_sample: Result<Vec<_>, EvalError> = samples
        .iter()
        .map(|s| score_sample(s, parser, scorer, metrics, skip_errors))
        .collect();
    finish_records(per_sample?, samples, metrics)
}

fn finish_records(
    per_sample: Vec<Vec<crate::datamodel::EvaluationRecord>>,
    samples: &[crate::datamodel::BenchmarkSample],
    metrics: &[MetricKind],
) -> Result<Vec<crate::datamodel::EvaluationRecord>, EvalError> {
    let mut records: Vec<_> = per_sample.into_iter().flatten().collect();
    if metrics.contains(&MetricKind::CiderD) {
        records.extend(cider_records(samples));
    }
    records.sort_by(|a, b| {
        (&a.sample_id, &a.model_name, &a.metric_name)
            .cmp(&(&b.sample_id, &b.model_name, &b.metric_name))
    });
    Ok(records)
}

/// Mean score per (model, metric) over all samples.
pub fn aggregate_by_model(
    records: &[crate::datamodel::EvaluationRecord],
) -> std::collections::BTreeMap<(String, String), f64> {
    let mut sums: std::collections::BTreeMap<(String, String), (f64, usize)> =
        std::collections::BTreeMap::new();
    for r in records {
        let e = sums
            .entry((r.model_name.clone(), r.metric_name.clone()))
            .or_insert((0.0, 0));
        e.0 += r.score;
        e.1 += 1;
    }
    sums.into_iter()
        .map(|(k, (sum, n))| (k, sum / n as f64))
        .collect()
}
