use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("order {from} does not divide {to}")]
    IncompatibleOrder { from: u32, to: u32 },
    #[error("quotient is not a Fourier-Jacobi series at q-order {0}")]
    NotDivisible(String),
    #[error("requested precision {requested} exceeds available {available}")]
    InsufficientPrecision {
        requested: String,
        available: String,
    },
    #[error("empty series")]
    EmptySeries,
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("target is not in the span of the basis: {0}")]
    Inconsistent(String),
    #[error("precision too low to separate basis elements: {0}")]
    Underdetermined(String),
    #[error("unknown identity '{0}'")]
    UnknownIdentity(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
