use crate::model::ValidationReport;

/// Errors raised across the library. CLI exit codes are derived from
/// [`Error::exit_code`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shapelet span (l-1)*d = {span} does not fit series of length {series_len}")]
    ShapeletTooLong { span: usize, series_len: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid dataset: {0}")]
    Validation(ValidationReport),

    #[error("series {index} has length {found}, expected m = {expected}")]
    LengthMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("feature matrix has {found} columns, model expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("all feature columns are constant")]
    DegenerateData,

    #[error("unknown class {0}")]
    UnknownClass(i64),

    #[error("unsupported archive format version {found} (expected {expected})")]
    ArchiveVersion { expected: u32, found: u32 },

    #[error("invalid time series: {0}")]
    InvalidSeries(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// 2 for configuration problems, 3 for data problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::UnknownClass(_) | Error::ArchiveVersion { .. } => 2,
            _ => 3,
        }
    }
}
