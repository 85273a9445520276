//! Direct summation of Σ (n+α)^{−s} with an Euler–Maclaurin tail.
//!
//! Accurate whenever Re s is not very negative; used above the series
//! cutoff and high in the critical strip, where the Hermite integral
//! suffers cancellation.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

use super::hermite::{exp_ratio, exp_ratio_deriv};

const MAX_BERNOULLI_TERMS: usize = 60;

/// c_k = B_{2k}/(2k)! for k = 1..MAX_BERNOULLI_TERMS.
fn bernoulli_coefficients() -> &'static [f64] {
    static C: OnceLock<Vec<f64>> = OnceLock::new();
    C.get_or_init(|| {
        let mut out = Vec::with_capacity(MAX_BERNOULLI_TERMS);
        let two_pi_sq = (2.0 * PI) * (2.0 * PI);
        let mut scale = 1.0;
        for k in 1..=MAX_BERNOULLI_TERMS {
            scale /= two_pi_sq;
            let zeta_2k = match k {
                1 => PI.powi(2) / 6.0,
                2 => PI.powi(4) / 90.0,
                3 => PI.powi(6) / 945.0,
                4 => PI.powi(8) / 9450.0,
                5 => PI.powi(10) / 93555.0,
                _ => (1..80)
                    .rev()
                    .map(|n| (n as f64).powi(-2 * k as i32))
                    .sum::<f64>(),
            };
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            out.push(sign * 2.0 * zeta_2k * scale);
        }
        out
    })
}

/// Regular part ζ(s,α) − 1/(s−1) and, optionally, its s-derivative.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: Complex64,
    pub deriv: Complex64,
    /// Magnitude of the last Bernoulli term kept.
    pub error: f64,
}

/// Evaluates the regular part by Euler–Maclaurin with cut-off N chosen
/// from |s|; N doubles whenever the asymptotic tail stops decreasing
/// before reaching `tol`.
pub fn regular_part(s: Complex64, alpha: f64, tol: f64, with_deriv: bool) -> SeriesValue {
    let mut n_terms = (s.norm() / PI + 10.0).ceil() as usize;
    loop {
        if let Some(v) = try_regular_part(s, alpha, n_terms, tol, with_deriv) {
            return v;
        }
        if n_terms > 1 << 20 {
            return try_regular_part(s, alpha, n_terms, f64::INFINITY, with_deriv)
                .expect("infinite tolerance always accepts");
        }
        n_terms *= 2;
    }
}

fn try_regular_part(
    s: Complex64,
    alpha: f64,
    n_terms: usize,
    tol: f64,
    with_deriv: bool,
) -> Option<SeriesValue> {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut dsum = Complex64::new(0.0, 0.0);
    for n in (0..n_terms).rev() {
        let x = n as f64 + alpha;
        let lx = x.ln();
        let p = (-s * lx).exp();
        sum += p;
        if with_deriv {
            dsum -= lx * p;
        }
    }

    let x = n_terms as f64 + alpha;
    let l = x.ln();
    let u = (1.0 - s) * l;
    let x_ms = (-s * l).exp();
    sum += -l * exp_ratio(u) + 0.5 * x_ms;
    if with_deriv {
        dsum += l * l * exp_ratio_deriv(u) - 0.5 * l * x_ms;
    }

    let coeffs = bernoulli_coefficients();
    let inv_x2 = 1.0 / (x * x);
    let mut p = s;
    let mut dp = Complex64::new(1.0, 0.0);
    let mut pow = x_ms / x;
    let target = 0.01 * tol;
    let mut prev = f64::INFINITY;
    let mut last = f64::INFINITY;
    for (k, &c) in coeffs.iter().enumerate() {
        let term = c * p * pow;
        let mag = term.norm();
        if k >= 2 && mag > prev {
            return None;
        }
        sum += term;
        if with_deriv {
            dsum += c * pow * (dp - l * p);
        }
        last = mag;
        if mag < target {
            break;
        }
        prev = mag;
        let kk = 2.0 * (k as f64 + 1.0);
        let a = s + (kk - 1.0);
        let b = s + kk;
        dp = dp * a * b + p * (a + b);
        p = p * a * b;
        pow *= inv_x2;
    }
    if last >= target && tol.is_finite() {
        return None;
    }
    Some(SeriesValue {
        value: sum,
        deriv: dsum,
        error: last,
    })
}
