use std::fs;
use std::io::Write;

use anyhow::{bail, Context, Result};

use capture::consistency::{consistency_report, ConsistencyReport};
use capture::datamodel::{self, EvaluationRecord};
use capture::matcher::{aggregate_by_model, evaluate_dataset, MetricKind};
use capture::scenegraph::ExternalTuples;

use crate::config::RunConfig;

/// `evaluate`: score every candidate, write per-sample records and a
/// per-model aggregate table.
pub fn cmd_evaluate(config: &RunConfig) -> Result<()> {
    let samples = datamodel::load_benchmark(config.data_path()?)?;
    let metrics = config.metric_kinds()?;
    let (parser, scorer) = config.build_toolkit()?;
    let records = evaluate_dataset(&samples, &parser, &scorer, &metrics, config.skip_errors)?;
    if records.is_empty() {
        bail!("no records produced; is the dataset empty?");
    }

    let table = render_aggregate_table(&records, &metrics);
    if let Some(dir) = &config.out {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        datamodel::write_records(&records, &dir.join("records.jsonl"))?;
        fs::write(dir.join("aggregates.txt"), &table)
            .with_context(|| format!("cannot write to {}", dir.display()))?;
    }
    print!("{table}");
    Ok(())
}

/// `parse`: emit the extracted element tuples for each caption, one JSON
/// record per line.
pub fn cmd_parse(config: &RunConfig) -> Result<()> {
    let path = config.data_path()?;
    let content =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let (parser, _) = config.build_toolkit()?;

    let mut out = String::new();
    for line in content.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        // either a JSON object with a "caption" field or a plain caption
        let caption = match serde_json::from_str::<serde_json::Value>(line) {
            Ok(value) => value
                .get("caption")
                .and_then(|c| c.as_str())
                .map(str::to_string)
                .ok_or_else(|| anyhow::anyhow!("JSON line without a \"caption\" field"))?,
            Err(_) => line.to_string(),
        };
        let graph = parser.parse_caption(&caption);
        let record = ExternalTuples {
            caption,
            objects: graph.elements.objects.iter().cloned().collect(),
            attributes: graph.elements.attributes.iter().cloned().collect(),
            relations: graph.elements.relations.iter().cloned().collect(),
        };
        out.push_str(&serde_json::to_value(&record)?.to_string());
        out.push('\n');
    }
    match &config.out {
        Some(path) => fs::write(path, &out)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{out}"),
    }
    Ok(())
}

/// `consistency`: compute agreement statistics between metric scores and
/// the benchmark's expert scores, one report per metric.
pub fn cmd_consistency(config: &RunConfig) -> Result<()> {
    let samples = datamodel::load_benchmark(config.data_path()?)?;
    let records: Vec<EvaluationRecord> = match &config.records {
        Some(path) => datamodel::load_records(path)?,
        None => {
            let metrics = config.metric_kinds()?;
            let (parser, scorer) = config.build_toolkit()?;
            evaluate_dataset(&samples, &parser, &scorer, &metrics, config.skip_errors)?
        }
    };
    if records.is_empty() {
        bail!("no metric records available");
    }

    let mut metric_names: Vec<String> = Vec::new();
    for r in &records {
        if !metric_names.contains(&r.metric_name) {
            metric_names.push(r.metric_name.clone());
        }
    }
    metric_names.sort_unstable();

    let mut reports = Vec::new();
    for name in &metric_names {
        let subset: Vec<EvaluationRecord> = records
            .iter()
            .filter(|r| &r.metric_name == name)
            .cloned()
            .collect();
        let report = consistency_report(&subset, &samples)
            .with_context(|| format!("consistency for metric {name}"))?;
        reports.push(report);
    }

    print!("{}", render_consistency_table(&reports));
    if let Some(path) = &config.out {
        let mut file = fs::File::create(path)
            .with_context(|| format!("cannot create {}", path.display()))?;
        for report in &reports {
            let value = serde_json::to_value(report)?;
            writeln!(file, "{value}")?;
        }
    }
    Ok(())
}

/// Per-model mean scores, scaled by 100 for display.
fn render_aggregate_table(records: &[EvaluationRecord], metrics: &[MetricKind]) -> String {
    let aggregates = aggregate_by_model(records);
    let mut models: Vec<&String> = aggregates.keys().map(|(m, _)| m).collect();
    models.sort_unstable();
    models.dedup();

    let metric_names: Vec<&str> = metrics.iter().map(|m| m.name()).collect();
    let model_width = models
        .iter()
        .map(|m| m.len())
        .chain(["model".len()])
        .max()
        .unwrap();
    let mut out = String::new();
    out.push_str(&format!("{:<model_width$}", "model"));
    for name in &metric_names {
        out.push_str(&format!("  {name:>10}"));
    }
    out.push('\n');
    for model in models {
        out.push_str(&format!("{model:<model_width$}"));
        for name in &metric_names {
            match aggregates.get(&(model.clone(), name.to_string())) {
                Some(score) => out.push_str(&format!("  {:>10.2}", score * 100.0)),
                None => out.push_str(&format!("  {:>10}", "-")),
            }
        }
        out.push('\n');
    }
    out
}

/// Table 2-style consistency rendering, values scaled by 100.
fn render_consistency_table(reports: &[ConsistencyReport]) -> String {
    let name_width = reports
        .iter()
        .map(|r| r.metric.len())
        .chain(["metric".len()])
        .max()
        .unwrap();
    let mut out = String::new();
    out.push_str(&format!(
        "{:<name_width$}  {:>10}  {:>12}  {:>10}  {:>10}  {:>8}\n",
        "metric", "pcc", "1-R^2", "kendall", "sample_tau", "samples"
    ));
    for r in reports {
        out.push_str(&format!(
            "{:<name_width$}  {:>10.2}  {:>12.2}  {:>10.2}  {:>10.2}  {:>8}\n",
            r.metric,
            r.pcc * 100.0,
            r.one_minus_r2 * 100.0,
            r.kendall_tau * 100.0,
            r.sample_tau * 100.0,
            r.n_samples
        ));
    }
    out
}
