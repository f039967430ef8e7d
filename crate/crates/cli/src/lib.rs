//! Library side of the `evoverlap` command: configuration, the scoring
//! pipeline, and report rendering.

pub mod config;
pub mod error;
pub mod pipeline;
pub mod render;

pub use config::{Cli, Command, FileConfig, Format, ScoreConfig};
pub use error::CliError;
pub use pipeline::{load_corpus, run_score, score_corpora, PairRecord, ScoreOutput, ScoreSettings};
pub use render::{corpus_stats, render_report, render_stats, Report, ReportConfig};
