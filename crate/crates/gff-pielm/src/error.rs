//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by layer construction, sampling, assembly and solving.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid construction or configuration parameter.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A derivative order the activation cannot provide analytically.
    #[error("unsupported derivative order {order} for {activation} (max {max})")]
    UnsupportedOrder {
        activation: &'static str,
        order: u32,
        max: u32,
    },

    /// Input point dimension does not match the layer or domain.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Rejection sampling failed to reach the acceptance budget.
    #[error("sampling failed: {0}")]
    Sampling(String),

    /// Non-finite value encountered while assembling the linear system.
    #[error("non-finite value in {context} at row {row}")]
    NonFinite { context: &'static str, row: usize },

    /// Least-squares solve failure.
    #[error("least-squares solve failed: {0}")]
    Solve(String),

    /// Metric is undefined for the given input.
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// Unknown benchmark case identifier.
    #[error("unknown case '{0}'")]
    UnknownCase(String),

    /// Pipeline stage failure with stage tag, for CLI reporting.
    #[error("[{stage}] {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    /// Filesystem error while writing reports.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Tags an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
