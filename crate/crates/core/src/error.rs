use thiserror::Error;

/// Errors raised anywhere in the benchmark pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("data error: {0}")]
    Data(String),

    #[error("invalid parameters for {algorithm}: {message}")]
    InvalidParams { algorithm: String, message: String },

    #[error("numerical error: {0}")]
    Numeric(String),

    #[error("classifier {name} failed: {message}")]
    Classifier { name: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub(crate) fn params(algorithm: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::InvalidParams {
            algorithm: algorithm.into(),
            message: msg.into(),
        }
    }
}
