use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the toolkit.
///
/// `Io` is an environment failure (exit status 2 in the CLI); every other
/// variant is a problem with the supplied data or arguments (exit status 1).
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file at byte offset {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("truncated payload at byte offset {offset}: expected {expected} more bytes")]
    Truncated { offset: u64, expected: u64 },

    #[error("label out of range at record {record}: {label} not in 1..={k}")]
    LabelOutOfRange { record: usize, label: u16, k: u32 },

    #[error("non-finite feature value at record {record}, feature {feature}")]
    NonFinite { record: usize, feature: usize },

    #[error("empty (domain, label) cell: domain {domain}, label {label} has {count} samples (need at least 2)")]
    EmptyCell { domain: u16, label: u16, count: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// True for errors caused by bad user input rather than by the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
