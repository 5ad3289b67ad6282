use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for series of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("stamp train not found: {0}")]
    StampNotFound(String),

    #[error("clock alignment failed: mean residual {residual_s:.4} s exceeds {limit_s} s")]
    AlignmentFailed { residual_s: f64, limit_s: f64 },

    #[error("implausible clock drift {0:e} (|drift| must be < 1e-3)")]
    ImplausibleDrift(f64),

    #[error("insufficient baseline: {found} pulses, need at least {required}")]
    InsufficientBaseline { found: usize, required: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("training data has a single class ({0})")]
    SingleClass(&'static str),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            msg: msg.into(),
        }
    }

    /// Wraps an error with the pipeline stage it came from.
    pub fn at(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |e| Error::Stage {
            stage,
            source: Box::new(e),
        }
    }

    /// Process exit code for this error: 2 validation, 3 data, 4 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Stage { source, .. } => source.exit_code(),
            Error::Validation(_) | Error::IndexOutOfRange { .. } | Error::Json(_) => 2,
            Error::NonFinite(_) | Error::Numeric(_) => 4,
            Error::StampNotFound(_)
            | Error::AlignmentFailed { .. }
            | Error::ImplausibleDrift(_)
            | Error::InsufficientBaseline { .. }
            | Error::InsufficientData(_)
            | Error::SingleClass(_)
            | Error::Io { .. }
            | Error::Parse { .. } => 3,
        }
    }
}
