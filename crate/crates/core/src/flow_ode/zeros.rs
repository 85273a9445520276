//! Location and sink/source classification of zeta zeros.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Result, ZetaError};
use crate::output::fmt_f64;
use crate::special::{riemann_zeta, riemann_zeta_deriv, EvalConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    Sink,
    Source,
    TrivialSink,
    TrivialSource,
}

impl ZeroKind {
    pub fn is_sink(self) -> bool {
        matches!(self, ZeroKind::Sink | ZeroKind::TrivialSink)
    }
}

/// A located zero of ζ and its stability under s′ = ζ(s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub location: Complex64,
    pub deriv_re: f64,
    pub deriv_im: f64,
    pub kind: ZeroKind,
    /// |ζ(location)|.
    pub residual: f64,
}

const RESIDUAL_MAX: f64 = 1e-8;

fn newton_step(z: Complex64, cfg: &EvalConfig) -> Result<Complex64> {
    let f = riemann_zeta(z, cfg)?;
    let d = riemann_zeta_deriv(z, cfg)?;
    Ok(z - f / d)
}

fn is_trivial(z: Complex64) -> bool {
    if z.im.abs() >= 1e-8 || z.re > -1.0 {
        return false;
    }
    let k = (-z.re / 2.0).round();
    k >= 1.0 && (z.re + 2.0 * k).abs() < 1e-6
}

/// Refines z0 by Newton and classifies it by the sign of Re ζ′.
pub fn classify_zero(z0: Complex64, cfg: &EvalConfig) -> Result<ZeroRecord> {
    let r0 = riemann_zeta(z0, cfg)?.norm();
    if !(r0 < 1e-6) {
        return Err(ZetaError::Domain(format!(
            "|zeta({z0})| = {r0:e} is not a zero"
        )));
    }
    let mut z = newton_step(z0, cfg)?;
    let mut residual = riemann_zeta(z, cfg)?.norm();
    for _ in 0..4 {
        if residual < 1e-12 {
            break;
        }
        let next = newton_step(z, cfg)?;
        let r = riemann_zeta(next, cfg)?.norm();
        if r >= residual {
            break;
        }
        z = next;
        residual = r;
    }
    if residual >= RESIDUAL_MAX {
        return Err(ZetaError::Domain(format!(
            "Newton refinement of {z0} stalled at residual {residual:e}"
        )));
    }
    let trivial = is_trivial(z);
    if trivial {
        z.im = 0.0;
    }
    let d = riemann_zeta_deriv(z, cfg)?;
    if d.re.abs() < 1e-10 {
        return Err(ZetaError::Degenerate {
            location: z,
            deriv_re: d.re.abs(),
        });
    }
    let kind = match (trivial, d.re < 0.0) {
        (true, true) => ZeroKind::TrivialSink,
        (true, false) => ZeroKind::TrivialSource,
        (false, true) => ZeroKind::Sink,
        (false, false) => ZeroKind::Source,
    };
    Ok(ZeroRecord {
        location: z,
        deriv_re: d.re,
        deriv_im: d.im,
        kind,
        residual,
    })
}

/// A scan seed whose Newton refinement did not produce a usable zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedSeed {
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroScan {
    pub zeros: Vec<ZeroRecord>,
    pub skipped: Vec<SkippedSeed>,
}

pub const MAX_SCAN_HEIGHT: f64 = 200.0;
pub const MAX_WINDOW_HEIGHT: f64 = 500.0;
const SCAN_STEP: f64 = 0.05;
const SEED_LEVEL: f64 = 0.5;

fn newton_to_zero(seed: Complex64, cfg: &EvalConfig) -> std::result::Result<Complex64, String> {
    let mut z = seed;
    for _ in 0..60 {
        let f = riemann_zeta(z, cfg).map_err(|e| e.to_string())?;
        if f.norm() < 1e-9 {
            // one more step for good measure
            let d = riemann_zeta_deriv(z, cfg).map_err(|e| e.to_string())?;
            let next = z - f / d;
            let fn_ = riemann_zeta(next, cfg).map_err(|e| e.to_string())?;
            return Ok(if fn_.norm() < f.norm() { next } else { z });
        }
        let d = riemann_zeta_deriv(z, cfg).map_err(|e| e.to_string())?;
        let mut step = f / d;
        if step.norm() > 1.0 {
            step /= step.norm();
        }
        z -= step;
        if (z - seed).norm() > 5.0 {
            return Err(format!("Newton wandered to {z}"));
        }
    }
    Err("Newton did not converge in 60 iterations".into())
}

/// Zeros ρ = 1/2 + it with 0 < t ≤ t_max, found from local minima of
/// |ζ(1/2 + it)| and refined by complex Newton; sorted by height.
pub fn find_critical_zeros(t_max: f64, cfg: &EvalConfig) -> Result<ZeroScan> {
    if !(t_max <= MAX_SCAN_HEIGHT) || t_max.is_nan() {
        return Err(ZetaError::Domain(format!(
            "t_max = {t_max} exceeds the supported height {MAX_SCAN_HEIGHT}"
        )));
    }
    find_critical_zeros_between(0.0, t_max, cfg)
}

/// As `find_critical_zeros`, for heights t_lo < t ≤ t_hi up to
/// `MAX_WINDOW_HEIGHT`.
pub fn find_critical_zeros_between(t_lo: f64, t_hi: f64, cfg: &EvalConfig) -> Result<ZeroScan> {
    if !(t_hi <= MAX_WINDOW_HEIGHT) || t_lo.is_nan() || t_lo < 0.0 {
        return Err(ZetaError::Domain(format!(
            "window ({t_lo}, {t_hi}] outside [0, {MAX_WINDOW_HEIGHT}]"
        )));
    }
    let mut scan = ZeroScan {
        zeros: Vec::new(),
        skipped: Vec::new(),
    };
    if t_hi <= t_lo {
        return Ok(scan);
    }
    let start = (t_lo - SCAN_STEP).max(0.0);
    let n = ((t_hi - start) / SCAN_STEP).ceil() as usize;
    let ts: Vec<f64> = (0..=n + 1).map(|i| start + i as f64 * SCAN_STEP).collect();
    let mags: Vec<f64> = ts
        .iter()
        .map(|&t| riemann_zeta(Complex64::new(0.5, t), cfg).map(|v| v.norm()))
        .collect::<Result<_>>()?;
    let mut found: Vec<Complex64> = Vec::new();
    for i in 1..mags.len() - 1 {
        if !(mags[i] <= mags[i - 1] && mags[i] <= mags[i + 1] && mags[i] < SEED_LEVEL) {
            continue;
        }
        let t = ts[i];
        match newton_to_zero(Complex64::new(0.5, t), cfg) {
            Ok(z) if z.im > t_lo && z.im <= t_hi => {
                if found.iter().all(|w| (w - z).norm() >= 1e-4) {
                    found.push(z);
                }
            }
            Ok(_) => {}
            Err(reason) => scan.skipped.push(SkippedSeed { t, reason }),
        }
    }
    found.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
    for z in found {
        match classify_zero(z, cfg) {
            Ok(rec) => scan.zeros.push(rec),
            Err(e) => scan.skipped.push(SkippedSeed {
                t: z.im,
                reason: e.to_string(),
            }),
        }
    }
    Ok(scan)
}

/// The lowest zero on the critical line that is a sink, searching upward
/// in windows of height 50 up to `t_limit`.
pub fn first_critical_sink(t_limit: f64, cfg: &EvalConfig) -> Result<Option<ZeroRecord>> {
    let mut lo = 0.0;
    while lo < t_limit {
        let hi = (lo + 50.0).min(t_limit);
        let scan = find_critical_zeros_between(lo, hi, cfg)?;
        if let Some(z) = scan.zeros.into_iter().find(|z| z.kind == ZeroKind::Sink) {
            return Ok(Some(z));
        }
        lo = hi;
    }
    Ok(None)
}

/// Number of zeros of ζ with 0 < Im s < t_top in the strip
/// −1/2 < Re s < 3/2, counted by the argument principle.
///
/// The contour is the rectangle [−1/2, 3/2] × [−1/2, t_top]; it encloses
/// the pole at s = 1, which is added back. The top edge is nudged by 10⁻³
/// while a zero sits too close to it.
pub fn count_zeros_argument_principle(t_top: f64, step: f64, cfg: &EvalConfig) -> Result<usize> {
    if !(t_top > 0.0) || !(step > 0.0) {
        return Err(ZetaError::Domain("t_top and step must be positive".into()));
    }
    let mut top = t_top;
    for _ in 0..100 {
        let clear = (0..=40).all(|k| {
            let s = Complex64::new(-0.5 + 2.0 * k as f64 / 40.0, top);
            riemann_zeta(s, cfg)
                .map(|v| v.norm() > 0.05)
                .unwrap_or(false)
        });
        if clear {
            break;
        }
        top += 1e-3;
    }
    let corners = [
        Complex64::new(-0.5, -0.5),
        Complex64::new(1.5, -0.5),
        Complex64::new(1.5, top),
        Complex64::new(-0.5, top),
    ];
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..4 {
        let a = corners[k];
        let b = corners[(k + 1) % 4];
        let len = (b - a).norm();
        let n = (len / step).ceil() as usize;
        let dir = (b - a) / n as f64;
        let mut edge = Complex64::new(0.0, 0.0);
        for i in 0..=n {
            let s = a + dir * i as f64;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            let f = riemann_zeta(s, cfg)?;
            let d = riemann_zeta_deriv(s, cfg)?;
            edge += w * d / f;
        }
        total += edge * dir;
    }
    let winding = total / Complex64::new(0.0, 2.0 * PI);
    let rounded = winding.re.round();
    if (winding.re - rounded).abs() > 0.1 || winding.im.abs() > 0.1 {
        return Err(ZetaError::Numerical {
            t: top,
            reason: format!("winding number {winding} is not close to an integer"),
        });
    }
    // zeros − poles = winding; the single pole at s = 1 is inside
    Ok((rounded + 1.0) as usize)
}

/// Running proportion P_n = #sinks among the first n zeros / n.
pub fn sink_proportion(zeros: &[ZeroRecord]) -> Vec<(usize, f64)> {
    let mut sinks = 0usize;
    zeros
        .iter()
        .enumerate()
        .map(|(i, z)| {
            if z.kind.is_sink() {
                sinks += 1;
            }
            (i + 1, sinks as f64 / (i + 1) as f64)
        })
        .collect()
}

/// CSV `n,p_n` for the output of `sink_proportion`.
pub fn sink_proportion_csv(series: &[(usize, f64)]) -> String {
    let mut out = String::from("n,p_n\n");
    for (n, p) in series {
        out.push_str(&format!("{n},{}\n", fmt_f64(*p)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trivial_zeros_alternate() {
        let cfg = EvalConfig::default();
        for k in 1..=6 {
            let rec = classify_zero(c(-2.0 * k as f64, 0.0), &cfg).unwrap();
            let want = if k % 2 == 1 {
                ZeroKind::TrivialSink
            } else {
                ZeroKind::TrivialSource
            };
            assert_eq!(rec.kind, want, "k = {k}");
            assert!(rec.residual < 1e-8);
        }
    }

    #[test]
    fn non_zero_is_rejected() {
        assert!(classify_zero(c(2.0, 0.0), &EvalConfig::default()).is_err());
    }

    #[test]
    fn first_zero_is_a_source() {
        let scan = find_critical_zeros(15.0, &EvalConfig::default()).unwrap();
        assert_eq!(scan.zeros.len(), 1);
        let z = scan.zeros[0];
        assert!((z.location - c(0.5, 14.134_725_141_734_693)).norm() < 1e-9);
        assert_eq!(z.kind, ZeroKind::Source);
        assert_eq!(sink_proportion(&scan.zeros), vec![(1, 0.0)]);
    }

    #[test]
    fn empty_window() {
        let scan = find_critical_zeros(0.0, &EvalConfig::default()).unwrap();
        assert!(scan.zeros.is_empty());
        assert!(sink_proportion(&scan.zeros).is_empty());
        assert_eq!(sink_proportion_csv(&[]), "n,p_n\n");
        assert!(find_critical_zeros(250.0, &EvalConfig::default()).is_err());
    }

    #[test]
    fn windows_partition_the_zeros() {
        let cfg = EvalConfig::default();
        let whole = find_critical_zeros(40.0, &cfg).unwrap().zeros;
        let mut parts = find_critical_zeros_between(0.0, 21.0220396387716, &cfg)
            .unwrap()
            .zeros;
        parts.extend(
            find_critical_zeros_between(21.0220396387716, 40.0, &cfg)
                .unwrap()
                .zeros,
        );
        assert_eq!(whole.len(), 6);
        assert_eq!(parts.len(), 6);
        for (a, b) in whole.iter().zip(&parts) {
            assert!((a.location - b.location).norm() < 1e-9);
        }
    }

    #[test]
    fn argument_principle_counts_low_zeros() {
        let cfg = EvalConfig::default();
        assert_eq!(count_zeros_argument_principle(10.0, 0.01, &cfg).unwrap(), 0);
        assert_eq!(count_zeros_argument_principle(22.0, 0.01, &cfg).unwrap(), 2);
    }
}
