use std::path::Path;

use event_overlap::{MetricsError, ParseError, SimilarityError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("similarity service failure: {0}")]
    Similarity(SimilarityError),
    #[error("{0}")]
    NoPairs(String),
}

impl CliError {
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    /// 1: input, configuration or validation problem; 2: similarity
    /// service failure; 3: nothing to score.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Io { .. } | CliError::Invalid(_) => 1,
            CliError::Similarity(_) => 2,
            CliError::NoPairs(_) => 3,
        }
    }
}

impl From<SimilarityError> for CliError {
    fn from(err: SimilarityError) -> Self {
        match err {
            SimilarityError::Remote { .. } => CliError::Similarity(err),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(err: MetricsError) -> Self {
        match err {
            MetricsError::NoPairs => CliError::NoPairs(err.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}
