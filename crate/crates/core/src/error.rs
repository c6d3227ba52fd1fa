use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("{what} size {requested} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("evaluation needs {required} multiplies, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("exact sum did not reduce to an integer: {0}")]
    NonIntegral(String),

    #[error("I + A stayed near-singular after {0} retries")]
    Singular(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

impl Error {
    /// Short stable identifier used in machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::SizeMismatch { .. } => "size_mismatch",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::NonIntegral(_) => "non_integral",
            Error::Singular(_) => "singular",
            Error::Parse(_) => "parse",
            Error::Malformed(_) => "malformed",
        }
    }
}
