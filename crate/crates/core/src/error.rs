use thiserror::Error;

/// Errors produced by every layer of the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("replication probabilities must be non-increasing with a tied leading block: {0}")]
    OrderingViolation(String),
    #[error("initial population is empty (sum of z0 is 0)")]
    EmptyPopulation,
    #[error("probability {0} is outside the admissible range")]
    BadProbability(f64),
    #[error("kappa must be at least 1, got {0}")]
    BadKappa(u32),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("at least one type is required")]
    NoTypes,
    #[error("negative or non-finite input: {0}")]
    NegativeInput(f64),
    #[error("tolerance {0} is not attainable (must be finite, positive and above the double-precision floor)")]
    BadTolerance(f64),
    #[error("projected magnitude exceeds the safe range: {0}")]
    OverflowRisk(String),
    #[error("root solver failed: {0}")]
    SolverFailure(String),
    #[error("coupling violated at type {index}: z = {z} > y = {y}")]
    CouplingViolation { index: usize, z: u64, y: u64 },
    #[error("state does not match the requested step: {0}")]
    InvalidState(String),
    #[error("point is not in the dominant subspace (non-dominant component {0} is nonzero)")]
    NotInGamma(usize),
    #[error("no records to summarize")]
    EmptyInput,
    #[error("unknown figure id {0:?} (expected A, 1, 2 or 3)")]
    UnknownFigure(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
