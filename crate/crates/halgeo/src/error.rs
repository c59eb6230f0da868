use thiserror::Error;

/// Errors shared by every layer of the workbench.
///
/// Each variant carries a human-readable detail string; the variant fixes the
/// stable message prefix that the CLI exposes.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown symbol: {0}")]
    UnknownSymbol(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("variable not in sort: {0}")]
    VarNotInSort(String),
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
