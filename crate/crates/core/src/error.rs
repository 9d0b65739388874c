use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid curvature {0}: must be finite and > 0")]
    InvalidCurvature(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("degenerate centroid: Lorentzian squared norm {0} is not negative")]
    DegenerateCentroid(f64),

    #[error("child mask has no set bits")]
    EmptyChild,

    #[error("scene {scene}: level {level} missing")]
    IncompleteScene { scene: String, level: usize },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("insufficient points: need at least 4, got {0}")]
    InsufficientPoints(usize),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),

    #[error("format error: {0}")]
    Format(String),

    #[error("data corruption: {0}")]
    DataCorruption(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
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
}
