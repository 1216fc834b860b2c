use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the dimer toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("temperature must be positive, got {0} K")]
    NonPositiveTemperature(f64),

    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("density matrix is not in X form (largest forbidden entry {max_forbidden:e})")]
    NotXForm { max_forbidden: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(&'static str),

    #[error("invalid product decomposition: offending terms {terms:?}, weights sum to {weight_sum}")]
    InvalidDecomposition { terms: Vec<usize>, weight_sum: f64 },

    #[error("invalid susceptibility curve: {0}")]
    InvalidCurve(String),

    #[error("insufficient points: need at least {needed}, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("invalid model: {0}")]
    InvalidModel(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_temperature(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveTemperature(t))
    }
}
