use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("base must be at least 2, got {0}")]
    BadBase(u32),
    #[error("digit {digit} out of range for base {base}")]
    BadDigit { digit: u32, base: u32 },
    #[error("value {0} is outside [0, 1]")]
    OutOfUnitInterval(String),
    #[error("transform inapplicable to this class: {0}")]
    TransformInapplicable(String),
    #[error("base mismatch: {0} vs {1}")]
    BaseMismatch(u32, u32),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("matrix is not a hyperbolic automorphism: {0}")]
    NotHyperbolic(String),
    #[error("well-definedness violation: {0}")]
    WellDefinedness(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("no qualifying excursion within horizon {0}")]
    NoExcursion(usize),
    #[error("incompatible inverse-limit coordinates: {0}")]
    Incompatible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
