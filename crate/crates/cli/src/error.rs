use std::path::PathBuf;

use thiserror::Error;

/// Exit status when every requested check passed.
pub const EXIT_PASSED: u8 = 0;
/// Exit status when the run finished but at least one check failed.
pub const EXIT_CHECKS_FAILED: u8 = 1;
/// Exit status for bad flags or configuration (clap uses the same code).
pub const EXIT_USAGE: u8 = 2;
/// Exit status for numerical or I/O errors that stopped the run.
pub const EXIT_RUNTIME: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] drawstring_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_USAGE,
            _ => EXIT_RUNTIME,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
