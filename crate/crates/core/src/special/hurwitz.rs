//! Assembly of ζ(s,α) and ζ′(s,α) from either evaluation path.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::LN_10;

use super::euler_maclaurin::regular_part;
use super::hermite::{
    cancellation_exponent, hermite_d, hermite_d_deriv, hermite_h_deriv_quad, hermite_h_quad,
};
use super::{check_alpha, check_finite, EvalConfig, EvalPath};
use crate::error::{Result, ZetaError};

/// A value together with an error estimate and the path that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub value: Complex64,
    pub error: f64,
    pub path: EvalPath,
}

/// Path the automatic router picks for (s, α).
pub fn preferred_path(s: Complex64, alpha: f64, cfg: &EvalConfig) -> EvalPath {
    if s.re >= cfg.series_cutoff_sigma
        || cancellation_exponent(s, alpha) > cfg.max_cancellation_digits * LN_10
    {
        EvalPath::EulerMaclaurin
    } else {
        EvalPath::Hermite
    }
}

fn regular_on(s: Complex64, alpha: f64, cfg: &EvalConfig, path: EvalPath) -> Result<Evaluation> {
    match path {
        EvalPath::Hermite => {
            let d = hermite_d(s, alpha)?;
            let h = hermite_h_quad(s, alpha, cfg)?;
            Ok(Evaluation {
                value: d + h.value,
                error: h.error + cfg.trunc_threshold,
                path,
            })
        }
        EvalPath::EulerMaclaurin => {
            let v = regular_part(s, alpha, cfg.abs_tol, false);
            Ok(Evaluation {
                value: v.value,
                error: v.error,
                path,
            })
        }
    }
}

fn regular_deriv_on(
    s: Complex64,
    alpha: f64,
    cfg: &EvalConfig,
    path: EvalPath,
) -> Result<Evaluation> {
    match path {
        EvalPath::Hermite => {
            let d = hermite_d_deriv(s, alpha)?;
            let h = hermite_h_deriv_quad(s, alpha, cfg)?;
            Ok(Evaluation {
                value: d + h.value,
                error: h.error + cfg.trunc_threshold,
                path,
            })
        }
        EvalPath::EulerMaclaurin => {
            let v = regular_part(s, alpha, cfg.abs_tol, true);
            Ok(Evaluation {
                value: v.deriv,
                error: v.error,
                path,
            })
        }
    }
}

fn routed<F>(s: Complex64, alpha: f64, cfg: &EvalConfig, eval: F) -> Result<Evaluation>
where
    F: Fn(EvalPath) -> Result<Evaluation>,
{
    check_alpha(alpha)?;
    check_finite(s)?;
    match preferred_path(s, alpha, cfg) {
        EvalPath::Hermite => match eval(EvalPath::Hermite) {
            Err(ZetaError::Accuracy { .. }) => eval(EvalPath::EulerMaclaurin),
            other => other,
        },
        EvalPath::EulerMaclaurin => eval(EvalPath::EulerMaclaurin),
    }
}

/// The entire function ζ(s,α) − 1/(s−1).
pub fn hurwitz_regular(s: Complex64, alpha: f64, cfg: &EvalConfig) -> Result<Evaluation> {
    routed(s, alpha, cfg, |p| regular_on(s, alpha, cfg, p))
}

/// ∂/∂s of ζ(s,α) − 1/(s−1).
pub fn hurwitz_regular_deriv(s: Complex64, alpha: f64, cfg: &EvalConfig) -> Result<Evaluation> {
    routed(s, alpha, cfg, |p| regular_deriv_on(s, alpha, cfg, p))
}

fn pole_term(s: Complex64) -> Result<Complex64> {
    let z = s - 1.0;
    if z.re == 0.0 && z.im == 0.0 {
        return Err(ZetaError::Pole);
    }
    Ok(1.0 / z)
}

/// ζ(s,α) with error estimate and the path used.
pub fn hurwitz_zeta_detailed(s: Complex64, alpha: f64, cfg: &EvalConfig) -> Result<Evaluation> {
    let pole = pole_term(s)?;
    let mut r = hurwitz_regular(s, alpha, cfg)?;
    r.value += pole;
    Ok(r)
}

/// ζ(s,α) on a caller-chosen path, bypassing the router.
pub fn hurwitz_zeta_via(
    s: Complex64,
    alpha: f64,
    cfg: &EvalConfig,
    path: EvalPath,
) -> Result<Evaluation> {
    check_alpha(alpha)?;
    check_finite(s)?;
    let pole = pole_term(s)?;
    let mut r = regular_on(s, alpha, cfg, path)?;
    r.value += pole;
    Ok(r)
}

pub fn hurwitz_zeta(s: Complex64, alpha: f64, cfg: &EvalConfig) -> Result<Complex64> {
    Ok(hurwitz_zeta_detailed(s, alpha, cfg)?.value)
}

/// ∂ζ/∂s(s,α) = −1/(s−1)² + d′ + h′.
pub fn hurwitz_zeta_deriv(s: Complex64, alpha: f64, cfg: &EvalConfig) -> Result<Complex64> {
    let pole = pole_term(s)?;
    Ok(hurwitz_regular_deriv(s, alpha, cfg)?.value - pole * pole)
}

pub fn riemann_zeta(s: Complex64, cfg: &EvalConfig) -> Result<Complex64> {
    hurwitz_zeta(s, 1.0, cfg)
}

pub fn riemann_zeta_deriv(s: Complex64, cfg: &EvalConfig) -> Result<Complex64> {
    hurwitz_zeta_deriv(s, 1.0, cfg)
}
