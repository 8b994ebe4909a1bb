use thiserror::Error;

pub type Result<T> = std::result::Result<T, ForgeError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForgeError {
    #[error("partition does not refine the target partition")]
    NotRefinement,
    #[error("set is not contained in the target set")]
    NotSubset,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid forest: {0}")]
    InvalidForest(String),
    #[error("leaf count {m} exceeds the configured cap {cap}")]
    CapExceeded { m: usize, cap: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix diagonal is not identically one (max deviation {0:e})")]
    DiagonalViolation(f64),
    #[error("matrix is not positive semidefinite (minimum eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("degree {degree} exceeds the available degree {max}")]
    DegreeOverflow { degree: usize, max: usize },
    #[error("size guard: {what} has {size} entries, limit is {limit}")]
    SizeGuard { what: String, size: u128, limit: u128 },
    #[error("rewrite hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("construction failure: {0}")]
    Construction(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for ForgeError {
    fn from(e: std::io::Error) -> Self {
        ForgeError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for ForgeError {
    fn from(e: serde_json::Error) -> Self {
        ForgeError::Io(e.to_string())
    }
}
