use thiserror::Error;

use crate::config::InvariantViolation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate field: {count} node(s), need at least 2")]
    DegenerateField { count: usize },

    #[error("no data: {0}")]
    NoData(&'static str),

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("dense-range regime outside the large-density approximation: λπR_I² = {load:.4} < 1")]
    DenseRange { load: f64 },

    #[error("quadrature did not reach tolerance {tolerance:e} (error estimate {estimate:e} after {panels} panels)")]
    Quadrature { tolerance: f64, estimate: f64, panels: usize },

    #[error("need at least {needed} points spanning a decade, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("conditioning too rare (acceptance rate {rate:e}); increase trials")]
    RareConditioning { rate: f64 },

    #[error("guard zone is empty: margin {margin} ≥ region radius {radius}")]
    EmptyGuardZone { margin: f64, radius: f64 },

    #[error("configurations cannot share a trial: {0}")]
    IncompatibleConfigs(String),

    #[error(transparent)]
    Config(#[from] InvariantViolation),
}

pub type Result<T> = std::result::Result<T, Error>;
