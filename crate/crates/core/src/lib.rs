pub mod error;
pub mod eulerprod;
pub mod ffpoly;
pub mod mertens;
pub mod modarith;
pub mod paperconst;
pub mod par;
pub mod polyalg;
pub mod rignum;
pub mod sievebounds;
pub mod verify;

pub use error::{Error, Result};

/// Precision and execution backend shared by a computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Ctx {
    pub prec: rignum::Precision,
    pub exec: par::Execution,
}

impl Ctx {
    pub fn with_digits(digits: u32) -> Self {
        Ctx {
            prec: rignum::Precision::from_digits(digits),
            ..Ctx::default()
        }
    }
}
