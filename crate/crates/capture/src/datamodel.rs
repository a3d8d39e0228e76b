//! Benchmark and result schemas plus JSONL loading, validation and
//! writing. Everything is validated at the boundary: non-finite numbers,
//! out-of-range expert scores and duplicate keys never get further in.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("failed to read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Schema { line: usize, reason: String },
    #[error("line {line}: duplicate sample_id {sample_id:?}")]
    DuplicateSample { line: usize, sample_id: String },
    #[error("duplicate record for sample {sample_id:?}, model {model:?}, metric {metric:?}")]
    DuplicateRecord {
        sample_id: String,
        model: String,
        metric: String,
    },
    #[error("records span multiple metrics ({0:?} and {1:?}); pivot one metric at a time")]
    MixedMetrics(String, String),
    #[error("record for sample {sample_id:?}, model {model:?} has a non-finite score")]
    NonFiniteScore { sample_id: String, model: String },
    #[error("no records to write")]
    NoRecords,
}

/// One candidate caption with its producing model and optional expert
/// quality score (already normalized to [0, 1]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateEntry {
    #[serde(rename = "model")]
    pub model_name: String,
    pub caption: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expert_score: Option<f64>,
}

/// One benchmark row: an image's reference captions plus candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSample {
    pub sample_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_ref: Option<String>,
    pub references: Vec<String>,
    pub candidates: Vec<CandidateEntry>,
}

/// One (sample, model, metric) score with metric-specific sub-scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub sample_id: String,
    #[serde(rename = "model")]
    pub model_name: String,
    #[serde(rename = "metric")]
    pub metric_name: String,
    pub score: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sub_scores: BTreeMap<String, f64>,
}

/// Loads a benchmark JSONL file, validating every invariant and reporting
/// offending line numbers.
pub fn load_benchmark(path: &Path) -> Result<Vec<BenchmarkSample>, DataError> {
    let content = fs::read_to_string(path).map_err(|source| DataError::Read {
        path: path.display().to_string(),
        source,
    })?;
    load_benchmark_str(&content)
}

pub fn load_benchmark_str(content: &str) -> Result<Vec<BenchmarkSample>, DataError> {
    let mut samples = Vec::new();
    let mut seen_ids = BTreeSet::new();
    for (idx, line) in content.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let sample: BenchmarkSample =
            serde_json::from_str(line).map_err(|e| DataError::Schema {
                line: lineno,
                reason: e.to_string(),
            })?;
        validate_sample(&sample, lineno)?;
        if !seen_ids.insert(sample.sample_id.clone()) {
            return Err(DataError::DuplicateSample {
                line: lineno,
                sample_id: sample.sample_id,
            });
        }
        samples.push(sample);
    }
    Ok(samples)
}

fn validate_sample(sample: &BenchmarkSample, line: usize) -> Result<(), DataError> {
    let schema = |reason: String| DataError::Schema { line, reason };
    if sample.sample_id.trim().is_empty() {
        return Err(schema("empty sample_id".into()));
    }
    if sample.references.is_empty() {
        return Err(schema(format!(
            "sample {:?} has no references",
            sample.sample_id
        )));
    }
    for r in &sample.references {
        if r.trim().is_empty() {
            return Err(schema(format!(
                "sample {:?} has an empty reference caption",
                sample.sample_id
            )));
        }
    }
    let mut models = BTreeSet::new();
    for c in &sample.candidates {
        if c.caption.trim().is_empty() {
            return Err(schema(format!(
                "sample {:?}, model {:?}: empty caption",
                sample.sample_id, c.model_name
            )));
        }
        if !models.insert(&c.model_name) {
            return Err(schema(format!(
                "sample {:?}: duplicate model {:?}",
                sample.sample_id, c.model_name
            )));
        }
        if let Some(score) = c.expert_score {
            if !score.is_finite() || !(0.0..=1.0).contains(&score) {
                return Err(schema(format!(
                    "sample {:?}, model {:?}: expert_score {score} outside [0,1]",
                    sample.sample_id, c.model_name
                )));
            }
        }
    }
    Ok(())
}

fn validate_record(r: &EvaluationRecord, line: Option<usize>) -> Result<(), DataError> {
    if !r.score.is_finite() || r.sub_scores.values().any(|v| !v.is_finite()) {
        return Err(DataError::NonFiniteScore {
            sample_id: r.sample_id.clone(),
            model: r.model_name.clone(),
        });
    }
    if r.metric_name == "capture" {
        let schema = |reason: String| DataError::Schema {
            line: line.unwrap_or(0),
            reason,
        };
        if !(0.0..=1.0).contains(&r.score) {
            return Err(schema(format!(
                "capture score {} outside [0,1] for ({}, {})",
                r.score, r.sample_id, r.model_name
            )));
        }
        for kind in ["precision", "recall", "f1"] {
            for element in ["object", "attribute", "relation"] {
                let key = format!("{kind}_{element}");
                if !r.sub_scores.contains_key(&key) {
                    return Err(schema(format!(
                        "capture record ({}, {}) is missing sub_score {key:?}",
                        r.sample_id, r.model_name
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Serializes records as deterministic, key-sorted JSONL.
pub fn records_to_string(records: &[EvaluationRecord]) -> Result<String, DataError> {
    if records.is_empty() {
        return Err(DataError::NoRecords);
    }
    let mut out = String::new();
    for r in records {
        validate_record(r, None)?;
        // through Value so the emitted keys are sorted
        let value = serde_json::to_value(r).expect("record serializes");
        out.push_str(&value.to_string());
        out.push('\n');
    }
    Ok(out)
}

/// Writes records to a JSONL file; loading the file back yields an equal
/// list, and equal inputs produce byte-identical files.
pub fn write_records(records: &[EvaluationRecord], path: &Path) -> Result<(), DataError> {
    let content = records_to_string(records)?;
    let mut file = fs::File::create(path).map_err(|source| DataError::Write {
        path: path.display().to_string(),
        source,
    })?;
    file.write_all(content.as_bytes())
        .map_err(|source| DataError::Write {
            path: path.display().to_string(),
            source,
        })
}

pub fn load_records(path: &Path) -> Result<Vec<EvaluationRecord>, DataError> {
    let content = fs::read_to_string(path).map_err(|source| DataError::Read {
        path: path.display().to_string(),
        source,
    })?;
    load_records_str(&content)
}

pub fn load_records_str(content: &str) -> Result<Vec<EvaluationRecord>, DataError> {
    let mut records = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: EvaluationRecord =
            serde_json::from_str(line).map_err(|e| DataError::Schema {
                line: idx + 1,
                reason: e.to_string(),
            })?;
        validate_record(&record, Some(idx + 1))?;
        records.push(record);
    }
    Ok(records)
}

/// Pivots single-metric records into sample -> model -> score, losslessly.
/// Missing cells stay absent. Mixed metrics or duplicate (sample, model)
/// pairs are errors.
pub fn pivot_scores(
    records: &[EvaluationRecord],
) -> Result<BTreeMap<String, BTreeMap<String, f64>>, DataError> {
    let mut metric: Option<&str> = None;
    let mut out: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    for r in records {
        match metric {
            None => metric = Some(&r.metric_name),
            Some(m) if m != r.metric_name => {
                return Err(DataError::MixedMetrics(
                    m.to_string(),
                    r.metric_name.clone(),
                ))
            }
            _ => {}
        }
        let cell = out.entry(r.sample_id.clone()).or_default();
        if cell.insert(r.model_name.clone(), r.score).is_some() {
            return Err(DataError::DuplicateRecord {
                sample_id: r.sample_id.clone(),
                model: r.model_name.clone(),
                metric: r.metric_name.clone(),
            });
        }
    }
    Ok(out)
}
