use thiserror::Error;

/// Errors raised by constructions, verifiers and the solver.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("input contains a value the mean is not defined for: {0}")]
    NonPositiveInput(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("weight function is identically zero")]
    AllZeroWeights,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("not a probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("profile matrix fails conditions (i)-(iii): {0}")]
    InvalidProfile(String),

    #[error("matrix is not a transition matrix between the given sequences: {0}")]
    NotATransition(String),

    #[error("weights exceed the grid size: sum {sum} > {q}")]
    OverfullWeights { sum: u64, q: u64 },

    #[error("families are not certified as conjugated")]
    UncertifiedFamilies,

    #[error("({m}, {n}) is not a certified Ingham-Jessen pair: {reason}")]
    NotIjPair {
        m: String,
        n: String,
        reason: String,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
