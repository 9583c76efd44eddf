use thiserror::Error;

/// Errors raised by the symbolic and numerical kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("constant of a factored rational function must be nonzero")]
    ZeroConstant,
    #[error("point {0} is a zero or pole of the function")]
    AtZeroOrPole(String),
    #[error("zero has no valuation")]
    ZeroInput,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("entries from different fields: {0}")]
    MixedFields(String),
    #[error("entry is not invertible: {0}")]
    NonInvertibleEntry(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("integer too large to factor by trial division: {0}")]
    FactorizationTooLarge(String),
    #[error("evaluation at a lattice point")]
    LatticePoint,
    #[error("evaluation on the divisor of the function")]
    OnDivisor,
    #[error("unsupported number of functions: {0} (at most 4)")]
    UnsupportedArity(usize),
    #[error("divisors overlap")]
    OverlappingDivisors,
    #[error("invalid divisor: {0}")]
    InvalidDivisor(String),
    #[error("invalid torus: {0}")]
    InvalidTorus(String),
    #[error("invalid quadrature grid: {0}")]
    InvalidGrid(String),
    #[error("invalid uniformizer: {0}")]
    InvalidUniformizer(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
