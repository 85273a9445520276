use num_complex::Complex64;
use thiserror::Error;

use crate::flow_pde::GridField;

/// Errors raised by evaluation, validation and integration routines.
#[derive(Debug, Clone, Error)]
pub enum ZetaError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole at s = 1")]
    Pole,

    #[error("quadrature did not converge: estimate {estimate}, residual {residual:e}")]
    Accuracy { estimate: Complex64, residual: f64 },

    #[error("invalid character: {0}")]
    Validation(String),

    #[error("zero at {location} is degenerate: |Re zeta'| = {deriv_re:e}")]
    Degenerate { location: Complex64, deriv_re: f64 },

    #[error("step size underflow at t = {t}, state {state}")]
    Stiffness { t: f64, state: Complex64 },

    #[error("numerical failure at t = {t}: {reason}")]
    Numerical { t: f64, reason: String },

    #[error("pole guard hit at grid index {index}, value {value}")]
    Quench { index: usize, value: Complex64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("contraction failure: ratio {ratio} at iteration {iteration}")]
    ContractionFailure { iteration: usize, ratio: f64 },

    #[error("field integration failed at t = {t}: {reason}")]
    FieldFailure {
        t: f64,
        reason: String,
        last_valid: Box<GridField>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, ZetaError>;

impl From<std::io::Error> for ZetaError {
    fn from(e: std::io::Error) -> Self {
        ZetaError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for ZetaError {
    fn from(e: serde_json::Error) -> Self {
        ZetaError::Config(e.to_string())
    }
}
