use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors from ingestion, file formats and command execution.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad invocation: flags, config values, malformed `--set` expressions.
    /// Maps to exit code 1; everything else maps to exit code 2.
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("missing column '{name}'")]
    MissingColumn { name: String },

    #[error("column '{column}', row {row}: cannot use value '{value}' (missing or non-numeric)")]
    NonNumericCell {
        column: String,
        row: usize,
        value: String,
    },

    #[error("dataset has fewer than two data rows")]
    EmptyDataset,

    #[error("response column '{name}' is constant and cannot be standardized")]
    ConstantResponse { name: String },

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("{path}: corrupt model file: {reason}")]
    CorruptModelFile { path: PathBuf, reason: String },

    #[error("unsupported model format_version {found} (expected 1)")]
    VersionMismatch { found: u64 },

    #[error("{path}: corrupt trace file: {reason}")]
    CorruptTraceFile { path: PathBuf, reason: String },

    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error(transparent)]
    Core(mvgb::Error),
}

impl Error {
    /// Process exit code for this error: 1 for usage problems, 2 for
    /// data/model problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config { .. } => 1,
            _ => 2,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<mvgb::Error> for Error {
    fn from(e: mvgb::Error) -> Self {
        match e {
            // Out-of-range knobs are invocation problems, not data problems.
            mvgb::Error::InvalidSpec(_) | mvgb::Error::InvalidHyperParams(_) => {
                Error::Usage(e.to_string())
            }
            mvgb::Error::ConstantResponse { name } => Error::ConstantResponse { name },
            mvgb::Error::EmptyDataset => Error::EmptyDataset,
            other => Error::Core(other),
        }
    }
}
