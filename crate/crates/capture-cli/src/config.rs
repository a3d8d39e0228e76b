//! Run configuration: command-line flags and environment variables win
//! over the optional TOML config file, which wins over built-in defaults.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};

use capture::lexicon::bundled;
use capture::matcher::{MatchConfig, MetricKind, SoftAggregation};
use capture::textproc::{PosTagger, SentenceSplitter};
use capture::{CaptionParser, CaptureScorer, LexiconStore, MatchWeights, WordVectorProvider};

/// Flags shared by every subcommand. Each one can also be set through the
/// environment (prefix `CAPTURE_`) or the `--config` TOML file.
#[derive(Debug, Clone, Args)]
pub struct SharedArgs {
    /// Input dataset path
    #[arg(long, env = "CAPTURE_DATA")]
    pub data: Option<PathBuf>,

    /// Output directory (evaluate) or file (parse, consistency)
    #[arg(long, env = "CAPTURE_OUT")]
    pub out: Option<PathBuf>,

    /// TOML config file supplying defaults for any flag
    #[arg(long, env = "CAPTURE_CONFIG")]
    pub config: Option<PathBuf>,

    /// Comma-separated metrics: capture,bleu,rouge_l,cider_d,meteor
    #[arg(long, env = "CAPTURE_METRICS", value_delimiter = ',')]
    pub metrics: Option<Vec<String>>,

    /// Object,attribute,relation weights, e.g. 5,5,2
    #[arg(long, env = "CAPTURE_WEIGHTS")]
    pub weights: Option<String>,

    /// Disable the embedding-based soft matching stage
    #[arg(long, env = "CAPTURE_NO_SOFT")]
    pub no_soft: bool,

    /// How leftover soft scores enter precision/recall: sum or mean
    #[arg(long, env = "CAPTURE_SOFT_AGG", value_parser = ["sum", "mean"])]
    pub soft_agg: Option<String>,

    /// Disable stop-word filtering of parsed objects
    #[arg(long, env = "CAPTURE_NO_STOPWORDS")]
    pub no_stopwords: bool,

    /// Worker threads for dataset evaluation (0 = all cores)
    #[arg(long, env = "CAPTURE_JOBS")]
    pub jobs: Option<usize>,

    /// Skip samples that fail instead of aborting the run
    #[arg(long, env = "CAPTURE_SKIP_ERRORS")]
    pub skip_errors: bool,

    /// Print the resolved configuration and exit
    #[arg(long, env = "CAPTURE_PRINT_CONFIG")]
    pub print_config: bool,

    /// Directory in the WordNet-3.0 database layout (default: bundled)
    #[arg(long, env = "CAPTURE_WORDNET_DIR")]
    pub wordnet_dir: Option<PathBuf>,

    /// Stop-word list, one lemma per line (default: bundled)
    #[arg(long, env = "CAPTURE_STOPWORDS")]
    pub stopwords: Option<PathBuf>,

    /// Word-vector file for soft matching (default: bundled)
    #[arg(long, env = "CAPTURE_VECTORS")]
    pub vectors: Option<PathBuf>,

    /// Tag lexicon file, word<TAB>TAG per line (default: bundled)
    #[arg(long, env = "CAPTURE_TAG_LEXICON")]
    pub tag_lexicon: Option<PathBuf>,

    /// Abbreviation list for the sentence splitter (default: bundled)
    #[arg(long, env = "CAPTURE_ABBREVIATIONS")]
    pub abbreviations: Option<PathBuf>,

    /// Precomputed records JSONL (consistency only)
    #[arg(long, env = "CAPTURE_RECORDS")]
    pub records: Option<PathBuf>,

    /// Embedding service endpoint; replaces the word-vector file
    #[arg(long, env = "CAPTURE_EMBEDDING_ENDPOINT")]
    pub embedding_endpoint: Option<String>,

    /// Vector dimension the embedding service returns
    #[arg(long, env = "CAPTURE_EMBEDDING_DIMENSION")]
    pub embedding_dimension: Option<usize>,

    /// Embedding service request timeout in seconds
    #[arg(long, env = "CAPTURE_EMBEDDING_TIMEOUT", default_value_t = 10)]
    pub embedding_timeout: u64,
}

/// The same knobs as [`SharedArgs`], file-backed.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    data: Option<PathBuf>,
    out: Option<PathBuf>,
    metrics: Option<Vec<String>>,
    weights: Option<String>,
    no_soft: Option<bool>,
    soft_agg: Option<String>,
    no_stopwords: Option<bool>,
    jobs: Option<usize>,
    skip_errors: Option<bool>,
    wordnet_dir: Option<PathBuf>,
    stopwords: Option<PathBuf>,
    vectors: Option<PathBuf>,
    tag_lexicon: Option<PathBuf>,
    abbreviations: Option<PathBuf>,
    records: Option<PathBuf>,
    embedding_endpoint: Option<String>,
    embedding_dimension: Option<usize>,
}

/// Fully resolved configuration.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub metrics: Vec<String>,
    pub weights: (f64, f64, f64),
    pub no_soft: bool,
    pub soft_agg: String,
    pub no_stopwords: bool,
    pub jobs: usize,
    pub skip_errors: bool,
    pub wordnet_dir: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub vectors: Option<PathBuf>,
    pub tag_lexicon: Option<PathBuf>,
    pub abbreviations: Option<PathBuf>,
    pub records: Option<PathBuf>,
    pub embedding_endpoint: Option<String>,
    pub embedding_dimension: Option<usize>,
    pub embedding_timeout: u64,
}

impl RunConfig {
    pub fn resolve(args: &SharedArgs) -> Result<RunConfig> {
        let file: FileConfig = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("cannot read config file {}", path.display()))?;
                toml::from_str(&text)
                    .with_context(|| format!("invalid config file {}", path.display()))?
            }
            None => FileConfig::default(),
        };
        let weights_text = args
            .weights
            .clone()
            .or(file.weights)
            .unwrap_or_else(|| "5,5,2".to_string());
        let weights = parse_weights(&weights_text)?;
        let metrics = args
            .metrics
            .clone()
            .or(file.metrics)
            .unwrap_or_else(|| vec!["capture".to_string()]);
        let config = RunConfig {
            data: args.data.clone().or(file.data),
            out: args.out.clone().or(file.out),
            metrics,
            weights,
            no_soft: args.no_soft || file.no_soft.unwrap_or(false),
            soft_agg: args
                .soft_agg
                .clone()
                .or(file.soft_agg)
                .unwrap_or_else(|| "sum".to_string()),
            no_stopwords: args.no_stopwords || file.no_stopwords.unwrap_or(false),
            jobs: args.jobs.or(file.jobs).unwrap_or(0),
            skip_errors: args.skip_errors || file.skip_errors.unwrap_or(false),
            wordnet_dir: args.wordnet_dir.clone().or(file.wordnet_dir),
            stopwords: args.stopwords.clone().or(file.stopwords),
            vectors: args.vectors.clone().or(file.vectors),
            tag_lexicon: args.tag_lexicon.clone().or(file.tag_lexicon),
            abbreviations: args.abbreviations.clone().or(file.abbreviations),
            records: args.records.clone().or(file.records),
            embedding_endpoint: args.embedding_endpoint.clone().or(file.embedding_endpoint),
            embedding_dimension: args.embedding_dimension.or(file.embedding_dimension),
            embedding_timeout: args.embedding_timeout,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.data.is_none() {
            bail!("--data is required (see --help for usage)");
        }
        for (name, path) in [
            ("--data", &self.data),
            ("--wordnet-dir", &self.wordnet_dir),
            ("--stopwords", &self.stopwords),
            ("--vectors", &self.vectors),
            ("--tag-lexicon", &self.tag_lexicon),
            ("--abbreviations", &self.abbreviations),
            ("--records", &self.records),
        ] {
            if let Some(p) = path {
                if !p.exists() {
                    bail!("{name} path does not exist: {}", p.display());
                }
            }
        }
        if self.soft_agg != "sum" && self.soft_agg != "mean" {
            bail!("--soft-agg must be sum or mean, got {:?}", self.soft_agg);
        }
        if self.embedding_endpoint.is_some() && self.embedding_dimension.is_none() {
            bail!("--embedding-endpoint requires --embedding-dimension");
        }
        self.metric_kinds()?;
        let (a, b, g) = self.weights;
        MatchWeights::new(a, b, g).map_err(|e| anyhow::anyhow!(e.to_string()))?;
        Ok(())
    }

    pub fn metric_kinds(&self) -> Result<Vec<MetricKind>> {
        let mut kinds = Vec::new();
        for m in &self.metrics {
            let kind: MetricKind = m.parse().map_err(|e: String| anyhow::anyhow!(e))?;
            if !kinds.contains(&kind) {
                kinds.push(kind);
            }
        }
        if kinds.is_empty() {
            bail!("no metrics selected");
        }
        Ok(kinds)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Builds the parser and scorer from the configured resources.
    pub fn build_toolkit(&self) -> Result<(CaptionParser, CaptureScorer)> {
        let lexicon = Arc::new(self.load_lexicon()?);
        let splitter = match &self.abbreviations {
            Some(p) => SentenceSplitter::from_content(
                &fs::read_to_string(p)
                    .with_context(|| format!("cannot read {}", p.display()))?,
            ),
            None => SentenceSplitter::from_content(bundled::ABBREVIATIONS),
        };
        let tagger = match &self.tag_lexicon {
            Some(p) => PosTagger::from_path(p)?,
            None => PosTagger::from_content(bundled::TAG_LEXICON)?,
        };
        let parser = CaptionParser::new(splitter, tagger, lexicon.clone(), !self.no_stopwords);
        let embedder: Option<Arc<dyn capture::EmbeddingProvider>> = if self.no_soft {
            None
        } else if let Some(endpoint) = &self.embedding_endpoint {
            let dimension = self
                .embedding_dimension
                .expect("validated with the endpoint");
            Some(Arc::new(capture::lexicon::HttpEmbeddingProvider::new(
                endpoint.clone(),
                dimension,
                self.embedding_timeout,
            )))
        } else {
            let provider = match &self.vectors {
                Some(p) => WordVectorProvider::from_path(p)?,
                None => WordVectorProvider::bundled(),
            };
            Some(Arc::new(provider))
        };
        let (a, b, g) = self.weights;
        let match_config = MatchConfig {
            weights: MatchWeights::new(a, b, g).map_err(|e| anyhow::anyhow!(e.to_string()))?,
            soft_matching: !self.no_soft,
            soft_aggregation: if self.soft_agg == "mean" {
                SoftAggregation::Mean
            } else {
                SoftAggregation::Sum
            },
        };
        let scorer = CaptureScorer::new(lexicon, embedder, match_config);
        Ok((parser, scorer))
    }

    fn load_lexicon(&self) -> Result<LexiconStore> {
        let stopword_content = match &self.stopwords {
            Some(p) => {
                fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?
            }
            None => bundled::STOPWORDS.to_string(),
        };
        match &self.wordnet_dir {
            Some(dir) => {
                let read = |name: &str| -> Result<String> {
                    fs::read_to_string(dir.join(name))
                        .with_context(|| format!("cannot read {}", dir.join(name).display()))
                };
                let contents = [
                    (read("index.noun")?, read("data.noun")?, read("noun.exc")?),
                    (read("index.verb")?, read("data.verb")?, read("verb.exc")?),
                    (read("index.adj")?, read("data.adj")?, read("adj.exc")?),
                    (read("index.adv")?, read("data.adv")?, read("adv.exc")?),
                ];
                fn as_strs(t: &(String, String, String)) -> (&str, &str, &str) {
                    (t.0.as_str(), t.1.as_str(), t.2.as_str())
                }
                let parts = [
                    as_strs(&contents[0]),
                    as_strs(&contents[1]),
                    as_strs(&contents[2]),
                    as_strs(&contents[3]),
                ];
                Ok(LexiconStore::from_contents(parts, &stopword_content)?)
            }
            None => {
                let store = LexiconStore::from_contents(
                    [
                        (bundled::INDEX_NOUN, bundled::DATA_NOUN, bundled::EXC_NOUN),
                        (bundled::INDEX_VERB, bundled::DATA_VERB, bundled::EXC_VERB),
                        (bundled::INDEX_ADJ, bundled::DATA_ADJ, bundled::EXC_ADJ),
                        (bundled::INDEX_ADV, bundled::DATA_ADV, bundled::EXC_ADV),
                    ],
                    &stopword_content,
                )?;
                Ok(store)
            }
        }
    }

    pub fn data_path(&self) -> Result<&Path> {
        self.data
            .as_deref()
            .ok_or_else(|| anyhow::anyhow!("--data is required"))
    }
}

fn parse_weights(text: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        bail!("--weights expects three comma-separated numbers, got {text:?}");
    }
    let parse = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .with_context(|| format!("invalid weight {s:?}"))
    };
    Ok((parse(parts[0])?, parse(parts[1])?, parse(parts[2])?))
}
