use thiserror::Error;

/// Errors raised while validating distributions or evaluating measures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative probability {value} at index {index}")]
    NegativeProbability { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, expected 1")]
    SumNotOne { sum: f64 },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("dimension mismatch: expected K={expected}, found K={found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("a categorical distribution needs at least 2 outcomes, got {0}")]
    TooFewOutcomes(usize),
    #[error("ensemble has no members")]
    EmptyEnsemble,
    #[error("mixture has no components")]
    EmptyMixture,
    #[error("mixture has {weights} weights but {components} components")]
    WeightCountMismatch { weights: usize, components: usize },
    #[error("mixture weight {value} at index {index} is not positive")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("Dirichlet concentration {value} at index {index} is not positive")]
    NonPositiveConcentration { index: usize, value: f64 },
    #[error("interval bounds must satisfy 0 <= lo <= hi <= 1, got lo={lo}, hi={hi}")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("mixture nesting depth {depth} exceeds the limit of {limit}")]
    NestingTooDeep { depth: usize, limit: usize },
    #[error("outcome index {index} out of range for K={k}")]
    IndexOutOfRange { index: usize, k: usize },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("integration failed: {0}")]
    IntegrationFailure(String),
    #[error("epistemic estimates disagree: residual {residual}, expected KL {direct}, allowed {allowed}")]
    ConsistencyFailure {
        residual: f64,
        direct: f64,
        allowed: f64,
    },
}

impl Error {
    /// True for failures of the numerical engines rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::IntegrationFailure(_) | Error::ConsistencyFailure { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
