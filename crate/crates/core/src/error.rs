use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("scalar configuration mismatch: {0}")]
    ConfigMismatch(String),

    #[error("invalid scalar configuration: {0}")]
    InvalidConfig(String),

    #[error("operation is undefined for the zero vector")]
    ZeroVector,

    #[error("operation is undefined for the zero operator")]
    ZeroOperator,

    #[error("operation is undefined for the zero map")]
    ZeroMap,

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("not a unimodular permutation matrix: {0}")]
    NotUnimodularPermutation(String),

    #[error("operators are linearly dependent")]
    LinearlyDependent,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
