use thiserror::Error;

use crate::distributions::FamilyTag;

/// Errors raised by the inference, sampling and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {family} parameters {theta:?}: {reason}")]
    InvalidParameters {
        family: FamilyTag,
        theta: Vec<f64>,
        reason: &'static str,
    },

    #[error("{family} cannot be fitted to the data: {reason}")]
    FitInfeasible { family: FamilyTag, reason: String },

    #[error("AICc is undefined for n = {n}, k = {k} (requires n > k + 1)")]
    AiccDomain { n: usize, k: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("ensemble is stuck: all walkers are identical")]
    StuckEnsemble,

    #[error("ensemble too small: need at least {required} walkers, got {got}")]
    EnsembleTooSmall { required: usize, got: usize },

    #[error("no posterior samples available for {0}")]
    EmptyCloud(FamilyTag),

    #[error("degenerate threshold: {0}")]
    DegenerateThreshold(String),

    #[error("performance function returned {value} at {point:?}")]
    NonFiniteResponse { value: f64, point: Vec<f64> },

    #[error("performance model failed: {0}")]
    Model(String),
}

pub type Result<T> = std::result::Result<T, Error>;
