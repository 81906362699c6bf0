use thiserror::Error;

/// Errors raised while building or analysing algebras.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot parse scalar {input:?}: {reason}")]
    ScalarParse { input: String, reason: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("parity error: {0}")]
    Parity(String),

    /// A construction was requested outside the characteristics where it is defined.
    #[error("gating: {0}")]
    Gating(String),

    #[error("unavailable: {0}")]
    Unavailable(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    /// The engine produced an object violating one of its own invariants.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
