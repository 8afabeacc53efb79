//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong between ingesting a CSV and writing a report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input file not found: {path}")]
    FileNotFound { path: String },

    #[error("required header {name:?} missing from input")]
    MissingHeader { name: String },

    #[error("input contains a header row but no data rows")]
    EmptyTable,

    #[error("at least two records are required, found {found}")]
    TooFewRecords { found: usize },

    #[error("duplicate record identifiers: {}", ids.join(", "))]
    DuplicateRecordIds { ids: Vec<String> },

    #[error("empty record identifier at data row {row}")]
    EmptyRecordId { row: usize },

    #[error("column {column:?} has no observed values to impute from")]
    AllMissingColumn { column: String },

    #[error("column {column:?} still contains missing cells; impute before scaling")]
    UnimputedMissing { column: String },

    #[error("non-finite value in column {column:?}, row {row}")]
    NonFiniteInput { column: String, row: usize },

    #[error("invalid configuration: {message}")]
    InvalidConfig { message: String },

    #[error("eigendecomposition did not converge")]
    EigenFailure,

    #[error("covariance matrix is singular even after regularization")]
    DegenerateCovariance,

    #[error("training loss became non-finite at epoch {epoch}; try a smaller learning rate")]
    NonFiniteLoss { epoch: usize },

    #[error("label set is empty")]
    EmptyLabels,

    #[error("label references unknown record id {id:?}")]
    UnknownRecordId { id: String },

    #[error("labels must contain at least one positive and one negative record")]
    DegenerateLabels,

    #[error("sweep of {kind} failed at grid value {value}: {source}")]
    SweepFailure {
        kind: String,
        value: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Tag an error with the pipeline stage it surfaced in.
    pub fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Process exit code: 2 for configuration errors, 3 for data errors,
    /// 4 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig { .. } => 2,
            Error::NonFiniteInput { .. }
            | Error::EigenFailure
            | Error::DegenerateCovariance
            | Error::NonFiniteLoss { .. }
            | Error::UnimputedMissing { .. } => 4,
            Error::SweepFailure { source, .. } | Error::Stage { source, .. } => {
                source.exit_code()
            }
            _ => 3,
        }
    }
}
