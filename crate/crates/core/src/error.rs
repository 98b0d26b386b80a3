use std::path::PathBuf;

/// Errors produced by graph construction, matching, oracles and analytics.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("wrong graph family: expected {expected}")]
    WrongFamily { expected: &'static str },

    #[error("instance too large: {edges} edges exceeds the cap of {cap}")]
    TooLarge { edges: usize, cap: usize },

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("no steady state: retention factor {0} is not below 1")]
    NoSteadyState(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
