use alloc::string::String;

use crate::mgf::Side;

/// Errors raised by the bound evaluators, optimizers and generators.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("the {0:?} side is not supported by this phi")]
    UnsupportedSide(Side),
    #[error("phi(s)/|s| is not monotonically increasing near s = {0}")]
    MonotonicityViolation(f64),
    #[error("objective is not unimodal on the bracket: f({at}) = {value} is below the returned minimum")]
    NotUnimodal { at: f64, value: f64 },
    #[error("invalid process spec: {0}")]
    InvalidSpec(String),
    #[error("path has no points")]
    EmptyPath,
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! bail {
    ($variant:ident, $($arg:tt)*) => {
        return Err($crate::Error::$variant(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
