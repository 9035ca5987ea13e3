use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("field of size {0}^{1} exceeds the supported bound")]
    FieldTooLarge(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("singular matrix")]
    SingularMatrix,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("q = {0} is outside the supported range (odd q >= 5, even q >= 4)")]
    UnsupportedQ(u64),
    #[error("no valid construction parameters for q = {0}")]
    NoValidParams(u64),
    #[error("generator {0} acts trivially on the isotropic points")]
    DegenerateAction(usize),
    #[error("element order exceeds the search bound {0}")]
    OrderBound(u64),
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),
    #[error("invalid connection set: {0}")]
    ConnectionSet(String),
    #[error("group enumeration found {found} elements, expected {expected}")]
    CountMismatch { found: u128, expected: u128 },
    #[error("intertwiner search space too large: dimension {0}")]
    SearchTooLarge(usize),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("{0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
