use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid value for \"{key}\": {reason}")]
    Value { key: String, reason: String },

    #[error("unknown key \"{key}\" ({origin}, line {line})")]
    UnknownKey {
        key: String,
        origin: String,
        line: usize,
    },

    #[error("{origin}, line {line}: {reason}")]
    Syntax {
        origin: String,
        line: usize,
        reason: String,
    },

    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("solver stalled on {stalled} of {trials} trials")]
    Stalled { stalled: usize, trials: usize },

    #[error(transparent)]
    Core(#[from] fran_core::Error),
}

impl CliError {
    pub(crate) fn value(key: &str, reason: impl Into<String>) -> Self {
        CliError::Value {
            key: key.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 configuration, 3 I/O, 4 solver stalls.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 3,
            CliError::Stalled { .. } => 4,
            _ => 2,
        }
    }
}

/// Converts a library validation error into one naming the config key.
pub(crate) fn keyed(e: fran_core::Error) -> CliError {
    match e {
        fran_core::Error::Parameter { name, reason } => CliError::value(name, reason),
        other => CliError::Core(other),
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
