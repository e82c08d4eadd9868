use thiserror::Error;

/// Errors raised by the library.
///
/// `TheoremViolation` is kept apart from ordinary precondition failures: it
/// signals that a division or identity which is supposed to hold did not.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("weight lies on a wall: {0}")]
    WallWeight(String),
    #[error("weight outside the required alcove: {0}")]
    AlcoveViolation(String),
    #[error("no known decomposition: {0}")]
    UnknownDecomposition(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("realization inconsistent: {0}")]
    RealizationInconsistent(String),
    #[error("coefficient rings differ")]
    RingMismatch,
    #[error("wrong coefficient ring: {0}")]
    WrongRing(String),
    #[error("not divisible: {0}")]
    NotDivisible(String),
    #[error("reflection does not go in the positive direction: {0}")]
    NotPositiveReflection(String),
    #[error("normalization failed: {0}")]
    NormalizationFailed(String),
    #[error("wrong chart: {0}")]
    WrongChart(String),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("parity mismatch: {0}")]
    Parity(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("negative p-valuation: {0}")]
    NegativeValuation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
