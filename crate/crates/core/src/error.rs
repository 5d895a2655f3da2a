use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of budget or resolution. Carries the
    /// best estimate reached so callers can decide whether it is usable.
    #[error("integration failed after {panels} panels: estimate {estimate:e}, error estimate {error_estimate:e}")]
    IntegrationFailure {
        estimate: f64,
        error_estimate: f64,
        panels: usize,
    },

    #[error("survival function vanishes at t = {t}")]
    DegenerateTail { t: f64 },

    #[error("distribution {0} has an infinite mean")]
    InfiniteMean(String),

    #[error("integral diverges: requires {0}")]
    Convergence(String),

    #[error("order s = 1 is excluded from generating functions")]
    OrderOne,

    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate sample: zero standard deviation")]
    DegenerateSample,

    #[error("moment estimator undefined: sample mean {mean} is not greater than 1")]
    EstimatorUndefined { mean: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// True for failures of a statistical precondition (as opposed to bad
    /// input or numerical breakdown).
    pub fn is_statistical(&self) -> bool {
        matches!(
            self,
            Error::EstimatorUndefined { .. }
                | Error::Convergence(_)
                | Error::OrderOne
                | Error::InfiniteMean(_)
                | Error::DegenerateTail { .. }
                | Error::DegenerateSample
                | Error::InsufficientData { .. }
        )
    }
}
