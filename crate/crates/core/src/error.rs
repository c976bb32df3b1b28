use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the crate.
///
/// Every variant maps onto one of the process exit codes used by the command
/// line front end (see [`Error::exit_code`]).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("schema violation: {}", .0.join("; "))]
    Schema(Vec<String>),

    #[error("sweep grid is missing cell freq_hz={freq_hz} rx={rx} tx={tx}")]
    GridGap { freq_hz: f64, rx: usize, tx: usize },

    #[error("sweep frequencies are not strictly ascending at {0} Hz")]
    NonAscending(f64),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Short machine-parsable code printed by the CLI on failure.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "E_ARGUMENT",
            Error::DimensionMismatch { .. } => "E_DIMENSION",
            Error::Parse { .. } => "E_PARSE",
            Error::Schema(_) => "E_SCHEMA",
            Error::GridGap { .. } => "E_GRID_GAP",
            Error::NonAscending(_) => "E_NON_ASCENDING",
            Error::Numeric(_) => "E_NUMERIC",
            Error::Io { .. } => "E_IO",
        }
    }

    /// Process exit status: 3 for validation problems, 4 for numeric ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_) => 4,
            _ => 3,
        }
    }
}
