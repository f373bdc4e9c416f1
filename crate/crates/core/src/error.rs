use std::path::PathBuf;

/// Errors produced anywhere in the synthesis / analysis / diagnosis pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("signal too short: {len} samples, need at least {needed}")]
    Size { len: usize, needed: usize },

    #[error("non-finite sample at index {index} ({value})")]
    Data { index: usize, value: f64 },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("refusing to export an empty report (corpus had no records)")]
    EmptyReport,

    #[error("{}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}
