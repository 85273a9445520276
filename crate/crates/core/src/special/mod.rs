//! Hurwitz and Riemann zeta functions, their s-derivatives, and the
//! explicit majorants used by the local existence theory.

pub mod bounds;
pub mod euler_maclaurin;
pub mod hermite;
pub mod hurwitz;
pub mod quadrature;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZetaError};

pub use bounds::{bound_constants, d1_numerical, e_r, BoundConstants};
pub use hermite::{hermite_d, hermite_d_deriv, hermite_h, hermite_h_deriv};
pub use hurwitz::{
    hurwitz_regular, hurwitz_regular_deriv, hurwitz_zeta, hurwitz_zeta_deriv,
    hurwitz_zeta_detailed, hurwitz_zeta_via, riemann_zeta, riemann_zeta_deriv, Evaluation,
};
pub use quadrature::QuadRule;

/// Complex scalar used for s and for field values u = u₁ + iu₂.
pub type ComplexValue = Complex64;

/// Which representation produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalPath {
    /// 1/(s−1) + d + h with adaptive quadrature for h.
    Hermite,
    /// Partial sum of the defining series plus an Euler–Maclaurin tail.
    EulerMaclaurin,
}

impl std::fmt::Display for EvalPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EvalPath::Hermite => f.write_str("hermite"),
            EvalPath::EulerMaclaurin => f.write_str("euler_maclaurin"),
        }
    }
}

/// Tolerances and routing policy for zeta evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub abs_tol: f64,
    pub quad_rule: QuadRule,
    pub quad_max_refinements: usize,
    pub trunc_threshold: f64,
    pub series_cutoff_sigma: f64,
    /// The Hermite integral is abandoned for the series path once its
    /// integrand would cancel more than this many decimal digits.
    pub max_cancellation_digits: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            abs_tol: 1e-10,
            quad_rule: QuadRule::GaussLegendre15,
            quad_max_refinements: 2000,
            trunc_threshold: 1e-12,
            series_cutoff_sigma: 8.0,
            max_cancellation_digits: 4.0,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(ZetaError::Config("abs_tol must be positive".into()));
        }
        if !(self.trunc_threshold > 0.0) || self.trunc_threshold > self.abs_tol / 10.0 {
            return Err(ZetaError::Config(
                "trunc_threshold must lie in (0, abs_tol/10]".into(),
            ));
        }
        if !(self.series_cutoff_sigma > 1.0) {
            return Err(ZetaError::Config(
                "series_cutoff_sigma must exceed 1".into(),
            ));
        }
        if self.quad_max_refinements == 0 {
            return Err(ZetaError::Config(
                "quad_max_refinements must be positive".into(),
            ));
        }
        if !(self.max_cancellation_digits >= 0.0) {
            return Err(ZetaError::Config(
                "max_cancellation_digits must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(ZetaError::Domain(format!("alpha = {alpha} outside (0, 1]")))
    }
}

pub(crate) fn check_finite(s: Complex64) -> Result<()> {
    if s.re.is_finite() && s.im.is_finite() {
        Ok(())
    } else {
        Err(ZetaError::Domain(format!("non-finite argument {s}")))
    }
}
