use thiserror::Error;

use crate::rignum::NumError;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial syntax error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("the zero polynomial is not allowed")]
    ZeroPolynomial,

    #[error("polynomial is not squarefree, cannot be irreducible")]
    NotSquarefree,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("{0} is not squarefree")]
    NotSquarefreeModulus(u64),

    #[error("limit exceeded: {0}")]
    Limit(String),

    #[error("polynomial has a fixed prime divisor {0}")]
    FixedDivisor(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no admissible X in the search grid; most violated clause: {0}")]
    NoAdmissibleX(String),

    #[error("comparison is indeterminate at the working precision: {0}")]
    Indeterminate(String),

    #[error(transparent)]
    Num(#[from] NumError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
