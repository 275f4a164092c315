use serde::Serialize;
use thiserror::Error;

/// Everything the command-line layer can fail with.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] fsdiff_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Config {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("JSON output: {0}")]
    Json(#[from] serde_json::Error),

    #[error("missing required setting `{0}` (flag or config file)")]
    Missing(&'static str),

    #[error("a seed is required for {0}")]
    MissingSeed(&'static str),

    #[error("invalid value for `{name}`: {reason}")]
    InvalidArg { name: &'static str, reason: String },

    #[error("{0}")]
    Usage(String),

    #[error("could not build the worker pool: {0}")]
    Pool(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Io { .. } => "IO",
            CliError::Csv { .. } => "INVALID_CSV",
            CliError::Config { .. } => "INVALID_CONFIG",
            CliError::Json(_) => "JSON",
            CliError::Missing(_) => "MISSING_ARGUMENT",
            CliError::MissingSeed(_) => "MISSING_SEED",
            CliError::InvalidArg { .. } => "INVALID_ARGUMENT",
            CliError::Usage(_) => "USAGE",
            CliError::Pool(_) => "THREAD_POOL",
        }
    }

    /// 1 for bad input, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if !e.is_validation() => 2,
            CliError::Json(_) | CliError::Pool(_) => 2,
            _ => 1,
        }
    }

    pub fn envelope(&self) -> ErrorEnvelope {
        ErrorEnvelope {
            schema_version: crate::SCHEMA_VERSION,
            error: ErrorBody { code: self.code(), message: self.to_string(), exit_code: self.exit_code() },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorEnvelope {
    pub schema_version: u32,
    pub error: ErrorBody,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
    pub exit_code: i32,
}

pub type CliResult<T> = Result<T, CliError>;
