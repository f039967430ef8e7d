//! Command-line surface and configuration layering.
//!
//! Settings resolve in this order: command-line flag, `EVOVERLAP_*`
//! environment variable, the `--config` file, then built-in defaults.
//! The config file uses `key = value` lines (TOML syntax):
//!
//! ```toml
//! similarity = "remote"
//! remote_url = "http://localhost:8089"
//! threshold = 0.7
//! format = "json"
//! jobs = 4
//! macro = false
//! dedupe_items = false
//! per_doc = false
//! cache = true
//! ```

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use event_overlap::{Mode, Pooling, ProviderKind, SimilarityConfig, DEFAULT_THRESHOLD};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "evoverlap", version, about = "Event-overlap scoring for summaries")]
pub struct Cli {
    /// Configuration file with `key = value` settings
    #[arg(long, global = true, env = "EVOVERLAP_CONFIG", value_name = "F")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score candidate systems against references or source articles
    Score(ScoreArgs),
    /// Event and token statistics per system
    Stats(StatsArgs),
    /// Check an event file for content problems
    Validate(ValidateArgs),
    /// Re-rank systems from one or more JSON reports
    Rank(RankArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Reference,
    Source,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Reference => Mode::ReferenceOverlap,
            ModeArg::Source => Mode::SourceOverlap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderArg {
    Exact,
    Lexical,
    Remote,
}

impl From<ProviderArg> for ProviderKind {
    fn from(p: ProviderArg) -> ProviderKind {
        match p {
            ProviderArg::Exact => ProviderKind::Exact,
            ProviderArg::Lexical => ProviderKind::Lexical,
            ProviderArg::Remote => ProviderKind::Remote,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Tsv,
    Markdown,
    Json,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Candidate event files, one or more systems each
    #[arg(long, required = true, num_args = 1.., value_name = "F")]
    pub candidates: Vec<PathBuf>,

    /// Reference event file (human summaries or article events)
    #[arg(long, value_name = "F")]
    pub references: PathBuf,

    /// reference: mean recall against reference summaries;
    /// source: mean precision against source articles
    #[arg(long, value_enum)]
    pub mode: ModeArg,

    #[arg(long, value_enum, env = "EVOVERLAP_SIMILARITY")]
    pub similarity: Option<ProviderArg>,

    #[arg(long, env = "EVOVERLAP_REMOTE_URL", value_name = "URL")]
    pub remote_url: Option<String>,

    /// Argument texts match when similarity is strictly above this [default: 0.7]
    #[arg(long, env = "EVOVERLAP_THRESHOLD", value_name = "X")]
    pub threshold: Option<f64>,

    /// Average per-pair scores instead of pooling counts
    #[arg(long = "macro")]
    pub macro_average: bool,

    /// Collapse duplicate items within each document
    #[arg(long)]
    pub dedupe_items: bool,

    /// Also emit per document-pair counts
    #[arg(long)]
    pub per_doc: bool,

    /// Disable the remote similarity cache
    #[arg(long)]
    pub no_cache: bool,

    #[arg(long, value_enum, env = "EVOVERLAP_FORMAT")]
    pub format: Option<Format>,

    /// Worker threads for document-pair matching [default: available cores]
    #[arg(long, env = "EVOVERLAP_JOBS", value_name = "N")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long, value_name = "F")]
    pub events: PathBuf,

    #[arg(long, value_enum, env = "EVOVERLAP_FORMAT")]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, value_name = "F")]
    pub events: PathBuf,

    /// Event-type labels, one per line
    #[arg(long, value_name = "F")]
    pub ontology: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// JSON reports produced by `score --format json`
    #[arg(long, required = true, num_args = 1.., value_name = "F")]
    pub reports: Vec<PathBuf>,

    #[arg(long, value_enum, env = "EVOVERLAP_FORMAT")]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub similarity: Option<ProviderArg>,
    pub remote_url: Option<String>,
    pub threshold: Option<f64>,
    pub format: Option<Format>,
    pub jobs: Option<usize>,
    #[serde(rename = "macro")]
    pub macro_average: Option<bool>,
    pub dedupe_items: Option<bool>,
    pub per_doc: Option<bool>,
    pub cache: Option<bool>,
}

impl FileConfig {
    pub fn parse(input: &str) -> Result<Self, String> {
        toml::from_str(input).map_err(|e| e.message().to_string())
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
    }

    pub fn load_optional(path: Option<&Path>) -> Result<Self, CliError> {
        path.map(Self::load).transpose().map(Option::unwrap_or_default)
    }
}

/// Fully resolved settings for one `score` run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreConfig {
    pub candidates: Vec<PathBuf>,
    pub references: PathBuf,
    pub mode: Mode,
    pub similarity: SimilarityConfig,
    pub pooling: Pooling,
    pub dedupe_items: bool,
    pub per_doc: bool,
    pub format: Format,
    pub jobs: usize,
}

pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl ScoreConfig {
    pub fn resolve(args: ScoreArgs, file: &FileConfig) -> Result<Self, CliError> {
        let provider: ProviderKind = args
            .similarity
            .or(file.similarity)
            .map_or(ProviderKind::Lexical, Into::into);
        let threshold = args.threshold.or(file.threshold).unwrap_or(DEFAULT_THRESHOLD);
        // A URL from the environment or file is ignored unless the remote
        // provider is selected.
        let remote_url = match provider {
            ProviderKind::Remote => args.remote_url.or_else(|| file.remote_url.clone()),
            _ => None,
        };
        let similarity = SimilarityConfig {
            provider,
            threshold,
            remote_url,
            cache_enabled: !args.no_cache && file.cache.unwrap_or(true),
        };
        similarity
            .validate()
            .map_err(|e| CliError::Invalid(e.to_string()))?;

        let jobs = args.jobs.or(file.jobs).unwrap_or_else(default_jobs);
        if jobs == 0 {
            return Err(CliError::Invalid("--jobs must be at least 1".into()));
        }
        let macro_average = args.macro_average || file.macro_average.unwrap_or(false);

        Ok(Self {
            candidates: args.candidates,
            references: args.references,
            mode: args.mode.into(),
            similarity,
            pooling: if macro_average { Pooling::Macro } else { Pooling::Micro },
            dedupe_items: args.dedupe_items || file.dedupe_items.unwrap_or(false),
            per_doc: args.per_doc || file.per_doc.unwrap_or(false),
            format: args.format.or(file.format).unwrap_or_default(),
            jobs,
        })
    }
}
