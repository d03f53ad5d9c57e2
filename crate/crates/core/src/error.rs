//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by protocol configuration, the SA oracle, the estimator,
/// and the analysis layers.
#[derive(Debug, Error, PartialEq)]
pub enum Error {
    /// Aggregation weights are negative or do not sum to one.
    #[error("aggregation weights invalid: {0}")]
    WeightSum(String),

    /// Subset size N violates 1 <= N < K-1 or the SA authorization threshold.
    #[error("subset size invalid: {0}")]
    SubsetSize(String),

    /// Vector dimension does not match the configured d.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// A scalar or structural configuration field is out of range.
    #[error("config invalid: {0}")]
    Config(String),

    /// Subset-sum query below the SA authorization threshold.
    #[error("subset of size {got} below SA authorization threshold {n_sa}")]
    Authorization { got: usize, n_sa: usize },

    /// Subset-sum query names a client id outside [0, K).
    #[error("unknown client id {id} (K = {k})")]
    UnknownClient { id: usize, k: usize },

    /// Rejection sampling exceeded the proposal cap; the regime is misconfigured.
    #[error("no accepted design after {0} proposals")]
    RetryLimitExceeded(usize),

    /// Training corpus too short to form a single bigram.
    #[error("corpus has {0} tokens; need at least 2")]
    EmptyCorpus(usize),

    /// Stouffer statistic requested for a client with no participating rounds.
    #[error("client {0} participated in no rounds")]
    NoParticipation(usize),

    /// The (T, gamma) pair falls outside the feasible threshold window.
    #[error("threshold infeasible: need sqrt(T)*eps < gamma < sqrt(T)*m, got {0}")]
    ThresholdInfeasible(String),

    /// Degenerate input (K <= 2 for the variance bound, c <= 0 where positive
    /// masking is required).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// MC mutual-information estimate requested with too few samples.
    #[error("insufficient samples: {got} < {min}")]
    InsufficientSamples { got: usize, min: usize },

    /// I/O or serialization failure surfaced by the pipeline.
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
