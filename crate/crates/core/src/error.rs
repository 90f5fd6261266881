use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("envelope is not normalized: spectral L2 norm is {norm:.6e}, expected 1")]
    UnnormalizedEnvelope { norm: f64 },

    #[error("non-finite value in propagation at time step {step} (tau = {time:.6e})")]
    NonFinite { step: usize, time: f64 },

    #[error("propagation became unstable at time step {step} (max |P| = {magnitude:.3e}); use a finer grid")]
    Unstable { step: usize, magnitude: f64 },

    #[error("integrator step size underflow at t = {time:.9e}")]
    StepUnderflow { time: f64 },

    #[error("norm drift {drift:.3e} exceeds limit {limit:.3e} at t = {time:.9e}")]
    NormDrift { drift: f64, limit: f64, time: f64 },

    #[error("invalid schedule: {0}")]
    Schedule(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("csv error in {context}: {reason}")]
    Csv { context: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. } | Error::Unstable { .. } | Error::StepUnderflow { .. } | Error::NormDrift { .. }
        )
    }
}
