//! Error types shared across the engine.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Validation and precondition failures raised by engine operations.
///
/// Construction errors (weights, dimensions, labels) mean the input value
/// never existed; precondition errors (zero-probability conditioning,
/// degenerate shifts, impossible observations) mean a valid value was used
/// where the operation is undefined.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("outcome space needs at least one outcome")]
    EmptySpace,
    #[error("duplicate outcome label `{label}`")]
    DuplicateLabel { label: String },
    #[error("unknown outcome label `{label}`")]
    UnknownLabel { label: String },
    #[error("outcome index {index} out of range for a space of size {size}")]
    OutcomeOutOfRange { index: usize, size: usize },
    #[error("weight at index {index} is not a finite number")]
    NonFiniteWeight { index: usize },
    #[error("weight {value} at index {index} is negative")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weights sum to {sum}, which is outside tolerance {tolerance} of 1")]
    NotNormalized { sum: f64, tolerance: f64 },
    #[error("dimension mismatch: {detail}")]
    DimensionMismatch { detail: String },
    #[error("candidate set needs at least one candidate")]
    EmptyCandidateSet,
    #[error("conditioning event has zero probability")]
    ZeroProbabilityEvent,
    #[error("act index {act} out of range for {count} acts")]
    ActOutOfRange { act: usize, count: usize },
    #[error("utility for act {act} at world {world} is not finite")]
    NonFiniteUtility { act: usize, world: usize },
    #[error("utility matrix needs at least one act")]
    NoActs,
    #[error("shift probability {value} must lie strictly between 0 and 1")]
    InvalidShiftProbability { value: f64 },
    #[error("invalid shift target: {detail}")]
    InvalidShiftTarget { detail: String },
    #[error("empty conditioning event: {detail}")]
    EmptyConditioningEvent { detail: String },
    #[error("every hypothesis assigns the observation sequence probability zero")]
    ImpossibleObservation,
    #[error("stake {stake} must be positive and finite")]
    InvalidStake { stake: f64 },
}
