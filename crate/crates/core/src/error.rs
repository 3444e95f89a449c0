use thiserror::Error;

/// Errors raised by the algebra, the dynamic structures and the distance layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("polynomial has zero constant term and is not a unit")]
    NonUnit,
    #[error("degree bound mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("degree-0 slice is not the identity")]
    BadForm,
    #[error("index {index} out of range (len {len}) or index set not sorted/duplicate-free")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("degree {0} is not tracked")]
    DegreeNotTracked(usize),
    #[error("element update has a nonzero constant term")]
    ConstantTermUpdate,
    #[error("pivot 1 + v^T u is not a unit")]
    SingularPivot,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} too large (must be below 2^62)")]
    ModulusTooLarge(u64),
    #[error("prime {p} too small for h = {h}, n = {n} (need p >= 2^20 * h * n^2)")]
    PrimeTooSmall { p: u64, h: usize, n: usize },
    #[error("operation requires an undirected graph")]
    DirectedInput,
    #[error("graph is not strongly connected")]
    NotConnected,
    #[error("invalid weight {0}")]
    InvalidWeight(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
