use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the classification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("unknown record schema `{0}` (expected `native` or `dblp`)")]
    UnknownSchema(String),

    #[error("venue map is empty")]
    EmptyVenueMap,

    #[error("invalid area map: {0}")]
    InvalidAreaMap(String),

    #[error("venue `{venue}` is assigned to both `{first}` and `{second}`")]
    VenueConflict { venue: String, first: String, second: String },

    #[error("empty seed set")]
    EmptySeedSet,

    #[error("invalid BM25 parameters: {0}")]
    InvalidParams(String),

    #[error("index snapshot: {0}")]
    Snapshot(String),

    #[error("negative or non-finite feature value {value} at area {area}")]
    NegativeFeature { area: usize, value: f64 },

    #[error("feature vector has {actual} areas, expected {expected}")]
    AreaCountMismatch { expected: usize, actual: usize },

    #[error("configuration fingerprint mismatch: model has {model}, runtime has {runtime}")]
    FingerprintMismatch { model: String, runtime: String },

    #[error("every training instance is degenerate; nothing to fit")]
    DegenerateTraining,

    #[error("no training instances")]
    NoTrainingData,

    #[error("prediction for `{0}` has no gold label")]
    UnknownGoldId(String),

    #[error("unknown area `{0}`")]
    UnknownArea(String),

    #[error("unknown paper ids: {}", .0.join(", "))]
    UnknownPapers(Vec<String>),

    #[error("area `{area}` has {count} labeled papers; at least 2 are required")]
    TooFewLabels { area: String, count: usize },

    #[error("label file line {line}: {message}")]
    Label { line: usize, message: String },

    #[error("feature mask is empty")]
    EmptyMask,

    #[error("invalid benchmark configuration: {0}")]
    InvalidBenchmark(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
