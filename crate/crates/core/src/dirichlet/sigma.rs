//! The root σ₁ of ζ(σ) = 2, the window-limited van de Lune abscissa σ₀,
//! and the real-part bounds that hold to the right of σ₁.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lfunction::{l_eval, LFunctionHandle};
use crate::error::{Result, ZetaError};
use crate::special::{riemann_zeta, EvalConfig};

/// The real root of ζ(σ) = 2 on (1, 2), by bisection to 1e-8.
pub fn sigma1_root(cfg: &EvalConfig) -> Result<f64> {
    let f = |x: f64| -> Result<f64> { Ok(riemann_zeta(Complex64::new(x, 0.0), cfg)?.re - 2.0) };
    let (mut lo, mut hi) = (1.0 + 1e-6, 2.0);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Resolution of the σ₀ search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Sigma0Grid {
    pub sigma_step: f64,
    pub t_step: f64,
    pub sigma_tol: f64,
}

impl Default for Sigma0Grid {
    fn default() -> Self {
        Sigma0Grid {
            sigma_step: 0.005,
            t_step: 0.02,
            sigma_tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sigma0Estimate {
    /// Largest σ with a sign change of Re L(σ + it) in the window, or
    /// `sigma_lo` when none was found.
    pub sigma0: f64,
    /// False when no sign change occurred anywhere in the window.
    pub attained: bool,
    /// A height t at which Re L(sigma0 + it) ≤ 0.
    pub witness_t: Option<f64>,
    pub t_max: f64,
}

/// Minimum of Re L(σ + it) over the window, with its location.
fn window_min(
    l: &LFunctionHandle,
    sigma: f64,
    t_lo: f64,
    t_max: f64,
    dt: f64,
) -> Result<(f64, f64, f64)> {
    let n = ((t_max - t_lo) / dt).ceil() as usize;
    let ts: Vec<f64> = (0..=n).map(|i| (t_lo + i as f64 * dt).min(t_max)).collect();
    let vals: Vec<f64> = ts
        .par_iter()
        .map(|&t| l_eval(l, Complex64::new(sigma, t)).map(|v| v.re))
        .collect::<Result<_>>()?;
    let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (mut best, mut best_t) = (f64::INFINITY, 0.0);
    for (i, &v) in vals.iter().enumerate() {
        if v < best {
            best = v;
            best_t = ts[i];
        }
    }
    if best > 0.0 {
        // grid minima can straddle a narrow dip; polish the promising ones
        let threshold = 0.1;
        let candidates: Vec<usize> = (1..vals.len().saturating_sub(1))
            .filter(|&i| vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1] && vals[i] < threshold)
            .collect();
        let polished: Vec<(f64, f64)> = candidates
            .par_iter()
            .map(|&i| {
                golden_min(
                    |t| l_eval(l, Complex64::new(sigma, t)).map(|v| v.re),
                    ts[i - 1],
                    ts[i + 1],
                )
            })
            .collect::<Result<_>>()?;
        for (t, v) in polished {
            if v < best {
                best = v;
                best_t = t;
            }
        }
    }
    Ok((best, best_t, max))
}

fn golden_min<F>(f: F, mut a: f64, mut b: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..40 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
        if b - a < 1e-9 {
            break;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Window-limited estimate of σ₀(L): the largest σ ∈ [sigma_lo, sigma_hi]
/// for which Re L(σ + it) changes sign for some |t| ≤ t_max. Real
/// characters are scanned on t ≥ 0 only, by conjugate symmetry.
pub fn sigma0_estimate(
    l: &LFunctionHandle,
    sigma_lo: f64,
    sigma_hi: f64,
    t_max: f64,
    grid: &Sigma0Grid,
) -> Result<Sigma0Estimate> {
    if !(sigma_lo < sigma_hi) {
        return Err(ZetaError::Domain("sigma_lo must be below sigma_hi".into()));
    }
    if !(t_max >= 0.0)
        || !(grid.sigma_step > 0.0)
        || !(grid.t_step > 0.0)
        || !(grid.sigma_tol > 0.0)
    {
        return Err(ZetaError::Domain(
            "window and grid steps must be positive".into(),
        ));
    }
    let not_attained = Sigma0Estimate {
        sigma0: sigma_lo,
        attained: false,
        witness_t: None,
        t_max,
    };
    if t_max == 0.0 {
        return Ok(not_attained);
    }
    let t_lo = if l.character().is_real() { 0.0 } else { -t_max };
    let changes = |sigma: f64| -> Result<Option<f64>> {
        if l.has_pole() && sigma == 1.0 {
            return Ok(None);
        }
        let (min, t, max) = window_min(l, sigma, t_lo, t_max, grid.t_step)?;
        Ok((min <= 0.0 && max > 0.0).then_some(t))
    };

    let mut upper = sigma_hi;
    let mut found = None;
    let mut k = 0usize;
    loop {
        let sigma = (sigma_hi - k as f64 * grid.sigma_step).max(sigma_lo);
        if let Some(t) = changes(sigma)? {
            found = Some((sigma, t));
            break;
        }
        upper = sigma;
        if sigma <= sigma_lo {
            break;
        }
        k += 1;
    }
    let Some((mut lo, mut witness)) = found else {
        return Ok(not_attained);
    };
    let mut hi = upper;
    while hi - lo > grid.sigma_tol {
        let mid = 0.5 * (lo + hi);
        match changes(mid)? {
            Some(t) => {
                lo = mid;
                witness = t;
            }
            None => hi = mid,
        }
    }
    Ok(Sigma0Estimate {
        sigma0: lo,
        attained: true,
        witness_t: Some(witness),
        t_max,
    })
}

/// Which of the real-part and imaginary-part bounds hold at s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReBoundsReport {
    pub value: Complex64,
    /// ζ(Re s), the majorant.
    pub zeta_sigma: f64,
    pub re_lower: f64,
    pub re_upper: f64,
    pub im_bound: f64,
    pub re_lower_holds: bool,
    pub re_upper_holds: bool,
    pub im_holds: bool,
}

impl ReBoundsReport {
    pub fn all_hold(&self) -> bool {
        self.re_lower_holds && self.re_upper_holds && self.im_holds
    }
}

/// Checks max{0, 2 − ζ(σ)} < Re L(s) ≤ ζ(σ) and |Im L(s)| < ζ(σ) − 1 at
/// s = σ + it with σ > 1. The upper bound is attained by ζ itself at t = 0,
/// so it is tested up to abs_tol.
pub fn re_bounds_check(l: &LFunctionHandle, s: Complex64) -> Result<ReBoundsReport> {
    if !(s.re > 1.0) {
        return Err(ZetaError::Domain(format!("Re s = {} must exceed 1", s.re)));
    }
    let value = l_eval(l, s)?;
    let zeta_sigma = riemann_zeta(Complex64::new(s.re, 0.0), l.eval_cfg())?.re;
    let re_lower = (2.0 - zeta_sigma).max(0.0);
    let im_bound = zeta_sigma - 1.0;
    Ok(ReBoundsReport {
        value,
        zeta_sigma,
        re_lower,
        re_upper: zeta_sigma,
        im_bound,
        re_lower_holds: value.re > re_lower,
        re_upper_holds: value.re <= zeta_sigma + l.eval_cfg().abs_tol,
        im_holds: value.im.abs() < im_bound,
    })
}
