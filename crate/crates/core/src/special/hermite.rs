//! The Hermite decomposition ζ(s,α) = 1/(s−1) + d(s,α) + h(s,α).
//!
//! `d` is entire and evaluated through f(u) = (e^u − 1)/u; `h` is the
//! exponentially damped Hermite integral, computed by adaptive
//! Gauss–Legendre on a truncated interval.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

use super::quadrature::{adaptive_gauss_legendre, Quadrature};
use super::{check_alpha, EvalConfig};
use crate::error::Result;

/// |u| below which f and f′ are summed from their Taylor series.
pub const F_SERIES_RADIUS: f64 = 0.5;

const TWO_PI: f64 = 2.0 * PI;

/// f(u) = (e^u − 1)/u, entire, with f(0) = 1.
pub fn exp_ratio(u: Complex64) -> Complex64 {
    if u.norm() < F_SERIES_RADIUS {
        // sum_k u^k / (k+1)!
        let mut term = Complex64::new(1.0, 0.0);
        let mut acc = term;
        for k in 1..24 {
            term = term * u / (k as f64 + 1.0);
            acc += term;
        }
        acc
    } else {
        (u.exp() - 1.0) / u
    }
}

/// f′(u) = (e^u (u − 1) + 1)/u², with f′(0) = 1/2.
pub fn exp_ratio_deriv(u: Complex64) -> Complex64 {
    if u.norm() < F_SERIES_RADIUS {
        // sum_k (k+1) u^k / (k+2)!
        let mut pow = Complex64::new(1.0, 0.0);
        let mut fact = 2.0;
        let mut acc = Complex64::new(0.5, 0.0);
        for k in 1..24 {
            pow *= u;
            fact *= k as f64 + 2.0;
            acc += pow * ((k as f64 + 1.0) / fact);
        }
        acc
    } else {
        (u.exp() * (u - 1.0) + 1.0) / (u * u)
    }
}

/// d(s,α) = (α^{1−s} − 1)/(s − 1) + 1/(2α^s), finite at s = 1.
pub fn hermite_d(s: Complex64, alpha: f64) -> Result<Complex64> {
    check_alpha(alpha)?;
    let l = -alpha.ln();
    Ok(exp_ratio((s - 1.0) * l) * l + 0.5 * (s * l).exp())
}

/// ∂d/∂s(s,α).
pub fn hermite_d_deriv(s: Complex64, alpha: f64) -> Result<Complex64> {
    check_alpha(alpha)?;
    let l = -alpha.ln();
    Ok(exp_ratio_deriv((s - 1.0) * l) * (l * l) + 0.5 * l * (s * l).exp())
}

/// Upper envelope of |h integrand| at t (both leading factors of two kept).
fn integrand_envelope(s: Complex64, alpha: f64, t: f64) -> f64 {
    let r2 = alpha * alpha + t * t;
    let growth = if s.re < 0.0 || r2 >= 1.0 {
        r2.powf(s.re.abs() / 2.0)
    } else {
        r2.powf(-s.re / 2.0)
    };
    4.0 * growth * (s.norm() * FRAC_PI_2 * (s.im.abs() * FRAC_PI_2).cosh()) * (-TWO_PI * t).exp()
}

/// Truncation point: first t (on a 0.25 grid, t ≥ 1) where the envelope,
/// padded by the log factor that appears in h′, drops below `threshold`.
fn truncation_point(s: Complex64, alpha: f64, threshold: f64) -> f64 {
    let mut t: f64 = 1.0;
    while t < 400.0 {
        let pad = 2.0 + (alpha * alpha + t * t).ln().abs();
        if integrand_envelope(s, alpha, t) * pad < threshold {
            return t;
        }
        t += 0.25;
    }
    t
}

fn breakpoints(alpha: f64, upper: f64) -> Vec<f64> {
    let mut pts = vec![0.25 * alpha, alpha];
    let mut t = alpha + 1.0;
    while t < upper {
        pts.push(t);
        t += 2.0;
    }
    pts
}

/// Integrand of h: 2 sin(s·atan(t/α)) (α²+t²)^{−s/2} / (e^{2πt} − 1).
#[inline]
fn h_integrand(s: Complex64, alpha: f64, t: f64) -> Complex64 {
    if t <= 0.0 {
        // t → 0⁺ limit: 2 · s(t/α) / (2πt) · α^{−s}
        return s / (PI * alpha) * (-s * alpha.ln()).exp();
    }
    let w = (t / alpha).atan();
    let r2 = alpha * alpha + t * t;
    let damp = (-0.5 * s * r2.ln()).exp();
    2.0 * (s * w).sin() * damp / (TWO_PI * t).exp_m1()
}

/// Real-argument specialisation of `h_integrand`.
#[inline]
fn h_integrand_real(s: f64, alpha: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return s / (PI * alpha) * alpha.powf(-s);
    }
    let w = (t / alpha).atan();
    let r2 = alpha * alpha + t * t;
    2.0 * (s * w).sin() * r2.powf(-0.5 * s) / (TWO_PI * t).exp_m1()
}

#[inline]
fn h_deriv_integrand_real(s: f64, alpha: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return (1.0 - s * alpha.ln()) / (PI * alpha) * alpha.powf(-s);
    }
    let w = (t / alpha).atan();
    let r2 = alpha * alpha + t * t;
    let lr = r2.ln();
    let sw = s * w;
    2.0 * (w * sw.cos() - 0.5 * lr * sw.sin()) * (-0.5 * s * lr).exp() / (TWO_PI * t).exp_m1()
}

/// Integrand of h′ = ∂h/∂s.
#[inline]
fn h_deriv_integrand(s: Complex64, alpha: f64, t: f64) -> Complex64 {
    if t <= 0.0 {
        let a_s = (-s * alpha.ln()).exp();
        return (1.0 - s * alpha.ln()) / (PI * alpha) * a_s;
    }
    let w = (t / alpha).atan();
    let r2 = alpha * alpha + t * t;
    let lr = r2.ln();
    let damp = (-0.5 * s * lr).exp();
    let sw = s * w;
    2.0 * (w * sw.cos() - 0.5 * lr * sw.sin()) * damp / (TWO_PI * t).exp_m1()
}

fn integrate_truncated<F>(s: Complex64, alpha: f64, cfg: &EvalConfig, f: F) -> Result<Quadrature>
where
    F: Fn(f64) -> Complex64,
{
    let upper = truncation_point(s, alpha, cfg.trunc_threshold);
    adaptive_gauss_legendre(
        f,
        0.0,
        upper,
        &breakpoints(alpha, upper),
        cfg.abs_tol * 0.5,
        cfg.quad_max_refinements,
        cfg.quad_rule,
    )
}

/// The Hermite integral h(s,α), together with its quadrature record.
pub fn hermite_h_quad(s: Complex64, alpha: f64, cfg: &EvalConfig) -> Result<Quadrature> {
    check_alpha(alpha)?;
    if s.im == 0.0 {
        let x = s.re;
        return integrate_truncated(s, alpha, cfg, |t| h_integrand_real(x, alpha, t).into());
    }
    integrate_truncated(s, alpha, cfg, |t| h_integrand(s, alpha, t))
}

/// h(s,α) = 2∫₀^∞ sin(s·atan(t/α)) / ((α²+t²)^{s/2} (e^{2πt} − 1)) dt.
pub fn hermite_h(s: Complex64, alpha: f64, cfg: &EvalConfig) -> Result<Complex64> {
    Ok(hermite_h_quad(s, alpha, cfg)?.value)
}

/// ∂h/∂s(s,α), differentiating under the integral sign.
pub fn hermite_h_deriv_quad(s: Complex64, alpha: f64, cfg: &EvalConfig) -> Result<Quadrature> {
    check_alpha(alpha)?;
    if s.im == 0.0 {
        let x = s.re;
        return integrate_truncated(s, alpha, cfg, |t| {
            h_deriv_integrand_real(x, alpha, t).into()
        });
    }
    integrate_truncated(s, alpha, cfg, |t| h_deriv_integrand(s, alpha, t))
}

pub fn hermite_h_deriv(s: Complex64, alpha: f64, cfg: &EvalConfig) -> Result<Complex64> {
    Ok(hermite_h_deriv_quad(s, alpha, cfg)?.value)
}

/// Log of the worst-case cancellation factor in the h integral: the
/// integrand magnitude grows like e^{|Im s|·atan(t/α) − 2πt} while the
/// integral itself stays O(1).
pub fn cancellation_exponent(s: Complex64, alpha: f64) -> f64 {
    let tau = s.im.abs();
    let q = tau * alpha / TWO_PI - alpha * alpha;
    if q <= 0.0 {
        return 0.0;
    }
    let t = q.sqrt();
    (tau * (t / alpha).atan() - TWO_PI * t).max(0.0)
}
