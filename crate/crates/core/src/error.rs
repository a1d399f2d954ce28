use thiserror::Error;

/// Errors surfaced by the pipeline.
///
/// Every variant maps to a stable machine-readable kind string via
/// [`Error::kind`], which the CLI uses for its single-line failure output.
#[derive(Debug, Error)]
pub enum Error {
    /// Structural CSV problem (bad header, wrong column count, unknown label).
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Cleaning removed every record; downstream stages need data.
    #[error("dataset is empty after cleaning")]
    EmptyDataset,

    /// A class is missing or too small for a stratified split.
    #[error("stratification error: {0}")]
    Stratify(String),

    /// Row width does not match what the model or scaler was fitted on.
    #[error("shape mismatch: expected {expected} columns, got {actual}")]
    Shape { expected: usize, actual: usize },

    /// Model fitting rejected its inputs (non-binary labels, bad k, ...).
    #[error("fit error: {0}")]
    Fit(String),

    /// Invalid argument to a metric computation.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Invalid run configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable kind tag for machine-parsable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::EmptyDataset => "empty-dataset",
            Error::Stratify(_) => "stratify",
            Error::Shape { .. } => "shape",
            Error::Fit(_) => "fit",
            Error::Argument(_) => "argument",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "serialize",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
