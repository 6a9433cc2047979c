use thiserror::Error;

/// Errors raised by the algebra and code layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field specification: {0}")]
    InvalidField(String),
    #[error("levels are not nested: {0}")]
    NotNested(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("polynomial is reducible: {0}")]
    Reducible(String),
    #[error("search budget exhausted after {attempts} attempts (seed {seed})")]
    BudgetExhausted { attempts: u64, seed: u64 },
    #[error("enumeration cap exceeded: {size} > {cap}")]
    CapExceeded { size: u128, cap: u128 },
    #[error("invalid tuple at index {index}: {reason}")]
    InvalidTuple { index: usize, reason: String },
    #[error("element is not a unit")]
    NotUnit,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
