use thiserror::Error;

use crate::exactmath::MathError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degree contains the zero vector")]
    ZeroVector,
    #[error("degree vectors sum to ({0},{1}), not zero")]
    Unbalanced(i64, i64),
    #[error("degree spans a degenerate polygon")]
    Degenerate,
    #[error("direction ({0},{1}) is not generic for this polygon")]
    NotGeneric(i64, i64),
    #[error("search exceeded the budget of {0}")]
    BudgetExceeded(u64),
    #[error("inconsistent dual graph: {0}")]
    InconsistentDual(String),
    #[error(transparent)]
    Math(#[from] MathError),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::ZeroVector => "ZeroVector",
            Error::Unbalanced(..) => "Unbalanced",
            Error::Degenerate => "Degenerate",
            Error::NotGeneric(..) => "NotGeneric",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::InconsistentDual(_) => "InconsistentDual",
            Error::Math(_) => "MathError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
