//! Closed-form majorants for h, h′ and d′ on the box [−β, β]², and the
//! numerical sup used in place of a closed-form bound on d.

use serde::Serialize;
use statrs::function::gamma::gamma;
use std::f64::consts::{FRAC_PI_2, PI};

use super::check_alpha;
use super::hermite::hermite_d;
use crate::error::{Result, ZetaError};
use num_complex::Complex64;

/// Majorants for the pieces of the Hermite decomposition on [−β, β]².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundConstants {
    pub alpha: f64,
    pub beta: f64,
    /// Bound on |h|: 2(a + b).
    pub h1: f64,
    /// Bound on |h′|: i1 + i2.
    pub h2: f64,
    /// Bound on |d′|; zero at α = 1 where d ≡ 1/2.
    pub d2: f64,
    /// Sup of |f′| on the boundary of [−r, r]² at r = ln(1/α)(β+1).
    /// Undefined (r = 0) at α = 1.
    pub e_r: Option<f64>,
    pub a_ab: f64,
    pub b_b: f64,
    pub i1_ab: f64,
    pub i2_ab: f64,
}

/// E_r = e^r (2r² + 6r + 4)/r².
pub fn e_r(r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(ZetaError::Domain(format!("E_r needs r > 0, got {r}")));
    }
    Ok(r.exp() * (2.0 * r * r + 6.0 * r + 4.0) / (r * r))
}

fn a_constant(alpha: f64, beta: f64) -> f64 {
    let ba = beta / alpha;
    (1.0 + 1.0 / (alpha * alpha)).powf(beta / 2.0) * (ba + ba.sinh()) / (2.0 * PI)
}

fn b_constant(beta: f64) -> f64 {
    let lead = beta * FRAC_PI_2 + (beta * FRAC_PI_2).sinh();
    let p = 2f64.powf(beta / 2.0);
    lead * ((p + 1.0) / PI + p * gamma(beta + 1.0) / PI.powf(beta + 1.0) + 2.0 / PI.powi(3))
}

/// (π/2)(√(q² + 4π²α²)/(2πα))^q (1 + (π/2)/(e^q − 1)).
fn sec_power_integral(alpha: f64, q: f64) -> f64 {
    let base = (q * q + 4.0 * PI * PI * alpha * alpha).sqrt() / (2.0 * PI * alpha);
    FRAC_PI_2 * base.powf(q) * (1.0 + FRAC_PI_2 / q.exp_m1())
}

fn i1_constant(alpha: f64, beta: f64) -> f64 {
    (1.0 + (beta * FRAC_PI_2).sinh())
        * (2.0 / alpha.powf(beta))
        * sec_power_integral(alpha, beta + 2.0)
}

fn i2_constant(alpha: f64, beta: f64) -> f64 {
    (4.0 / alpha.powf(beta))
        * (beta + 2.0 / PI * (beta * FRAC_PI_2).sinh())
        * sec_power_integral(alpha, beta + 3.0)
}

pub fn bound_constants(alpha: f64, beta: f64) -> Result<BoundConstants> {
    check_alpha(alpha)?;
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(ZetaError::Domain(format!("beta = {beta} must be positive")));
    }
    let a_ab = a_constant(alpha, beta);
    let b_b = b_constant(beta);
    let i1_ab = i1_constant(alpha, beta);
    let i2_ab = i2_constant(alpha, beta);
    let l = -alpha.ln();
    let (d2, e) = if l > 0.0 {
        let e = e_r(l * (beta + 1.0))?;
        (l * l * e + l / (2.0 * alpha.powf(beta)), Some(e))
    } else {
        (0.0, None)
    };
    Ok(BoundConstants {
        alpha,
        beta,
        h1: 2.0 * (a_ab + b_b),
        h2: i1_ab + i2_ab,
        d2,
        e_r: e,
        a_ab,
        b_b,
        i1_ab,
        i2_ab,
    })
}

/// 1.1 × the sup of |d(s, α)| sampled on a 101×101 grid of [−β, β]².
pub fn d1_numerical(alpha: f64, beta: f64) -> Result<f64> {
    check_alpha(alpha)?;
    const N: usize = 101;
    let mut sup: f64 = 0.0;
    for i in 0..N {
        let x = -beta + 2.0 * beta * i as f64 / (N - 1) as f64;
        for j in 0..N {
            let y = -beta + 2.0 * beta * j as f64 / (N - 1) as f64;
            sup = sup.max(hermite_d(Complex64::new(x, y), alpha)?.norm());
        }
    }
    Ok(1.1 * sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn e_one_is_twelve_e() {
        assert!((e_r(1.0).unwrap() - 12.0 * E).abs() < 1e-12);
        assert!(e_r(0.0).is_err());
    }

    #[test]
    fn h1_at_alpha_one_beta_two() {
        let b = bound_constants(1.0, 2.0).unwrap();
        let a = 2.0 * (2.0 + 2f64.sinh()) / (2.0 * PI);
        let bb = (PI + PI.sinh()) * (3.0 / PI + 4.0 / PI.powi(3) + 2.0 / PI.powi(3));
        assert!((b.a_ab - a).abs() < 1e-12);
        assert!((b.b_b - bb).abs() < 1e-10);
        assert!((b.h1 - 37.3).abs() < 0.05);
        assert_eq!(b.d2, 0.0);
        assert!(b.e_r.is_none());
    }

    #[test]
    fn d2_positive_below_one() {
        let b = bound_constants(0.5, 2.0).unwrap();
        assert!(b.d2 > 0.0 && b.h2 > 0.0 && b.e_r.unwrap() > 0.0);
    }

    #[test]
    fn d1_at_alpha_one_is_padded_half() {
        assert!((d1_numerical(1.0, 2.0).unwrap() - 0.55).abs() < 1e-12);
    }

    #[test]
    fn domain_checks() {
        assert!(bound_constants(0.0, 1.0).is_err());
        assert!(bound_constants(0.5, 0.0).is_err());
    }
}
