use thiserror::Error;

use crate::poly::ParseError;

/// Errors raised by the kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("Groebner basis computation exceeded {limit} reduction steps")]
    GroebnerCap { limit: usize },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("endpoint mismatch: {0}")]
    Endpoint(String),

    #[error("invalid construction: {0}")]
    Invalid(String),

    #[error("point is not a witness: {0}")]
    NotWitness(String),

    #[error("arity mismatch: expected {expected} arguments, found {found}")]
    Arity { expected: usize, found: usize },

    #[error("inconsistent verdicts: {0}")]
    Inconsistent(String),

    #[error("virtual count failed: {0}")]
    Count(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_nvars(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
