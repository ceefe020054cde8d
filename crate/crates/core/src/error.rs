use thiserror::Error;

/// Errors raised by channel construction, the Gaussian information engine and
/// the bound evaluators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("input power {value} exceeds budget {budget} at node {node}")]
    PowerExceeded { node: usize, value: f64, budget: f64 },

    #[error("degenerate conditional distribution (eigenvalue {eigenvalue:e})")]
    Degenerate { eigenvalue: f64 },

    #[error("invalid variable set: {0}")]
    InvalidVarSet(String),

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("invalid user subset: {0}")]
    InvalidSubset(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("negative mutual information {0:e} beyond numerical tolerance")]
    NegativeInformation(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
