use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HplError {
    /// A point or zero lies outside the open unit disk.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("length mismatch: left has {left} entries, right has {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("sequence too short: need at least {needed} points, got {got}")]
    TooShort { needed: usize, got: usize },

    /// The truncation is too small for the requested construction to be exact
    /// (empty core block, model space larger than the truncation, ...).
    #[error("truncation too small: {0}")]
    Truncation(String),

    /// Input violates a hypothesis the construction depends on
    /// (constant symbol, unsupported number of variables, ...).
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("insufficient family: {0}")]
    InsufficientFamily(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = HplError> = std::result::Result<T, E>;
