use alloc::string::String;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors produced by dataset construction, fitting and analysis.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Dataset has no usable rows (fewer than two).
    EmptyDataset,
    /// An operation that needs data received none.
    EmptyInput,
    /// A response column has zero sample variance and cannot be standardized.
    ConstantResponse { name: String },
    /// A value that must be finite is NaN or infinite.
    NonFiniteValue { context: String },
    /// Structural dataset invariant violated (shapes, names, one-hot groups).
    InvalidDataset(String),
    /// Synthetic-benchmark spec outside its documented ranges.
    InvalidSpec(String),
    /// Hyperparameter outside its documented range.
    InvalidHyperParams(String),
    /// Prediction input has the wrong number of feature columns.
    ShapeMismatch { expected: usize, got: usize },
    /// Two containers that must agree in dimension do not.
    DimensionMismatch { expected: usize, got: usize },
    /// The holdout split would leave fewer than two rows on one side.
    DegenerateHoldout { n_train: usize, n_holdout: usize },
    /// An operation needs more rows than the input provides.
    TooFewRows { needed: usize, got: usize },
    /// Clustering needs at least two items.
    TooFewItems { needed: usize, got: usize },
    /// The training trace lacks the per-iteration records an analysis needs.
    MissingTrace(String),
    /// An intervention referenced a feature the model does not know.
    UnknownFeature { name: String },
    /// A deserialized model failed structural validation.
    InvalidModel(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyDataset => write!(f, "dataset has fewer than two rows"),
            Error::EmptyInput => write!(f, "empty input"),
            Error::ConstantResponse { name } => {
                write!(f, "response column '{name}' is constant and cannot be standardized")
            }
            Error::NonFiniteValue { context } => write!(f, "non-finite value in {context}"),
            Error::InvalidDataset(msg) => write!(f, "invalid dataset: {msg}"),
            Error::InvalidSpec(msg) => write!(f, "invalid synthetic spec: {msg}"),
            Error::InvalidHyperParams(msg) => write!(f, "invalid hyperparameters: {msg}"),
            Error::ShapeMismatch { expected, got } => {
                write!(f, "expected {expected} feature columns, got {got}")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::DegenerateHoldout { n_train, n_holdout } => write!(
                f,
                "holdout split leaves too few rows (train {n_train}, holdout {n_holdout})"
            ),
            Error::TooFewRows { needed, got } => {
                write!(f, "need at least {needed} rows, got {got}")
            }
            Error::TooFewItems { needed, got } => {
                write!(f, "need at least {needed} items, got {got}")
            }
            Error::MissingTrace(msg) => write!(f, "training trace incomplete: {msg}"),
            Error::UnknownFeature { name } => write!(f, "unknown feature '{name}'"),
            Error::InvalidModel(msg) => write!(f, "invalid model: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
