use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("coefficient overflow in {0}")]
    Overflow(&'static str),

    #[error("degree {found} exceeds the supported maximum {max}")]
    Degree { max: usize, found: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("{what} has {size} items, above the cap of {cap}")]
    Cap {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("value {0} is not representable as an integer QUBO coefficient")]
    Representation(String),

    #[error("parse error at line {line}, column {column} (byte {offset}): {message}")]
    Parse {
        line: usize,
        column: usize,
        offset: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}

/// Checked arithmetic helpers; every coefficient computation goes through these.
pub(crate) mod checked {
    use super::{Error, Result};

    #[inline]
    pub fn add(a: i64, b: i64, ctx: &'static str) -> Result<i64> {
        a.checked_add(b).ok_or(Error::Overflow(ctx))
    }

    #[inline]
    pub fn mul(a: i64, b: i64, ctx: &'static str) -> Result<i64> {
        a.checked_mul(b).ok_or(Error::Overflow(ctx))
    }

    #[inline]
    pub fn neg(a: i64, ctx: &'static str) -> Result<i64> {
        a.checked_neg().ok_or(Error::Overflow(ctx))
    }
}
