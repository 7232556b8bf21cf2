use std::path::PathBuf;

/// Errors produced by the clustering library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(String),

    #[error("{path}: row {row}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid dataset: {0}")]
    InvalidData(String),

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("cosine distance undefined for zero vector at sample {index}")]
    ZeroVector { index: usize },

    #[error("index {index} out of range for {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("dataset has no labels")]
    MissingLabels,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
