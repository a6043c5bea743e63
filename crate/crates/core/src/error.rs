use thiserror::Error;

/// Errors produced by dataset construction, configuration checks, file
/// ingestion, and boosting runs.
#[derive(Debug, Error)]
pub enum Error {
    /// A class in `1..=K` has no instances. Carries the 1-based class id.
    #[error("class {0} has no instances")]
    EmptyClass(usize),

    /// A parameter is outside its documented range.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A caller broke an interface contract (length mismatch, non-finite
    /// feature, weights off the simplex, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A data file could not be parsed. Line numbers are 1-based and count
    /// the header.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A label field parsed but is outside `1..=K`.
    #[error("label {label} out of range at line {line}")]
    Label { line: usize, label: i64 },

    /// An operation requires a specific feature dimension.
    #[error("expected {expected}-dimensional features, got {got}")]
    Dimension { expected: usize, got: usize },

    /// The weak learner failed the learnability gate on the very first
    /// round, so no ensemble member exists.
    #[error("no hypothesis satisfied weak learnability at round 1")]
    NoWeakHypothesis,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
