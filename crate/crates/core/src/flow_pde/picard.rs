//! Local existence constants and the Picard iteration of the Duhamel map
//! u ↦ e^{tΔ}g + ∫₀ᵗ e^{(t−s)Δ} λL(u(s)) ds.

use num_complex::Complex64;
use serde::Serialize;

use super::grid::{GridField, Spectral};
use crate::error::{Result, ZetaError};
use crate::flow_ode::{pole_distance, FlowConfig};
use crate::special::{bound_constants, d1_numerical, BoundConstants};

pub const PANELS: usize = 16;

/// Constants controlling the local solution with ‖u‖_Y ≤ β and P(u) ≥ ε.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConstants {
    pub beta: f64,
    pub eps: f64,
    pub m: u32,
    pub alpha: f64,
    pub bounds: BoundConstants,
    /// 1.1 × sampled sup of |d| on the box.
    pub d1: f64,
    /// 1/ε + H₁ + D₁.
    pub z1: f64,
    /// 1/ε² + √2·H₂ + √2·D₂.
    pub z2: f64,
    /// m^{β+1}·Z₁.
    pub m1: f64,
    /// (m^{β+1} + m^{β+2})·Z₂.
    pub m2: f64,
    /// min{1/(2M₂), β/(2M₁), ε/(4M₁)}.
    pub t_local: f64,
}

pub fn local_constants(beta: f64, eps: f64, m: u32) -> Result<SolverConstants> {
    if !(beta > 0.0 && eps > 0.0) || m == 0 {
        return Err(ZetaError::Config(
            "need beta > 0, eps > 0 and m >= 1".into(),
        ));
    }
    let alpha = 1.0 / m as f64;
    let bounds = bound_constants(alpha, beta)?;
    let d1 = d1_numerical(alpha, beta)?;
    let z1 = 1.0 / eps + bounds.h1 + d1;
    let z2 = 1.0 / (eps * eps) + 2f64.sqrt() * (bounds.h2 + bounds.d2);
    let mf = m as f64;
    let m1 = mf.powf(beta + 1.0) * z1;
    let m2 = (mf.powf(beta + 1.0) + mf.powf(beta + 2.0)) * z2;
    let t_local = (1.0 / (2.0 * m2))
        .min(beta / (2.0 * m1))
        .min(eps / (4.0 * m1));
    Ok(SolverConstants {
        beta,
        eps,
        m,
        alpha,
        bounds,
        d1,
        z1,
        z2,
        m1,
        m2,
        t_local,
    })
}

/// The largest admissible (β, ε) for a datum: β = 2‖g‖_Y, ε = inf P(g)/3.
pub fn constants_for(g: &GridField, m: u32) -> Result<SolverConstants> {
    let beta = 2.0 * g.y_norm();
    let eps = g.min_pole_distance().1 / 3.0;
    local_constants(beta.max(f64::MIN_POSITIVE), eps, m)
}

#[derive(Debug, Clone, Serialize)]
pub struct PicardResult {
    #[serde(skip)]
    pub field: GridField,
    /// Sup over time nodes and grid of |u^{k+1} − u^k|.
    pub differences: Vec<f64>,
    /// Successive ratios of `differences` above the roundoff floor.
    pub ratios: Vec<f64>,
    pub iterations: usize,
    pub reached_roundoff: bool,
}

impl PicardResult {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }
}

/// Fixed-point iteration on [0, t_local]; the time integral uses
/// 16 panels × 2-point Gauss with values at the Gauss nodes interpolated
/// linearly between panel ends.
pub fn picard_local_solve(
    g: &GridField,
    consts: &SolverConstants,
    n_iter: usize,
    flow: &FlowConfig,
) -> Result<PicardResult> {
    if 2.0 * g.y_norm() > consts.beta * (1.0 + 1e-12) {
        return Err(ZetaError::Config(format!(
            "2 sup norm of the datum {} exceeds beta {}",
            2.0 * g.y_norm(),
            consts.beta
        )));
    }
    let p = g.min_pole_distance().1;
    if flow.nonlinearity.has_pole() && p < 3.0 * consts.eps * (1.0 - 1e-12) {
        return Err(ZetaError::Config(format!(
            "inf P of the datum {p} is below 3 eps = {}",
            3.0 * consts.eps
        )));
    }
    let t = consts.t_local;
    let h = t / PANELS as f64;
    let ends: Vec<f64> = (0..=PANELS).map(|j| j as f64 * h).collect();
    let off = h / (2.0 * 3f64.sqrt());
    let nodes: Vec<(usize, f64)> = (0..PANELS)
        .flat_map(|p| {
            let mid = ends[p] + h / 2.0;
            [(p, mid - off), (p, mid + off)]
        })
        .collect();
    let fft = Spectral::new(g);
    let k2 = fft.k2().to_vec();
    let gh = fft.forward(g.values());

    let mut iterate: Vec<Vec<Complex64>> = vec![g.values().to_vec(); PANELS + 1];
    let scale = 1.0 + g.sup_abs();
    let mut differences = Vec::new();
    let mut ratios = Vec::new();
    let mut reached_roundoff = false;
    let mut iterations = 0;
    for k in 0..n_iter {
        let mut n_hat = Vec::with_capacity(nodes.len());
        for &(p, s) in &nodes {
            let w = (s - ends[p]) / h;
            let u: Vec<Complex64> = iterate[p]
                .iter()
                .zip(&iterate[p + 1])
                .map(|(a, b)| a * (1.0 - w) + b * w)
                .collect();
            if flow.nonlinearity.has_pole() {
                if let Some((index, &value)) = u
                    .iter()
                    .enumerate()
                    .find(|(_, v)| pole_distance(**v) < flow.pole_guard_eps)
                {
                    return Err(ZetaError::Quench { index, value });
                }
            }
            let nl: Vec<Complex64> = u.iter().map(|&v| flow.field(v)).collect::<Result<_>>()?;
            n_hat.push(fft.forward(&nl));
        }
        let mut next = Vec::with_capacity(PANELS + 1);
        for (j, &tj) in ends.iter().enumerate() {
            let mut acc: Vec<Complex64> = gh
                .iter()
                .zip(&k2)
                .map(|(c, k2)| c * (-k2 * tj).exp())
                .collect();
            for (q, &(p, s)) in nodes.iter().enumerate() {
                if p >= j {
                    break;
                }
                for (i, a) in acc.iter_mut().enumerate() {
                    *a += 0.5 * h * (-k2[i] * (tj - s)).exp() * n_hat[q][i];
                }
            }
            next.push(fft.inverse(&acc));
        }
        let diff = next
            .iter()
            .zip(&iterate)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max);
        iterate = next;
        iterations = k + 1;
        if let Some(&prev) = differences.last() {
            let ratio = diff / prev;
            ratios.push(ratio);
            if ratio > 1.0 {
                return Err(ZetaError::ContractionFailure {
                    iteration: iterations,
                    ratio,
                });
            }
        }
        differences.push(diff);
        if diff <= 1e-14 * scale {
            reached_roundoff = true;
            break;
        }
    }
    let field = g.with_values(iterate.pop().expect("panel ends present"), t)?;
    Ok(PicardResult {
        field,
        differences,
        ratios,
        iterations,
        reached_roundoff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::LFunctionHandle;
    use crate::special::EvalConfig;
    use std::f64::consts::PI;

    fn zeta_flow(lambda: f64) -> FlowConfig {
        FlowConfig::new(
            LFunctionHandle::zeta(EvalConfig::default()).unwrap(),
            lambda,
            1.0,
        )
    }

    #[test]
    fn constants_are_positive_and_monotone_in_eps() {
        let a = local_constants(4.0, 0.5, 1).unwrap();
        assert!(a.t_local > 0.0);
        assert_eq!(
            a.t_local,
            (1.0 / (2.0 * a.m2))
                .min(4.0 / (2.0 * a.m1))
                .min(0.5 / (4.0 * a.m1))
        );
        let b = local_constants(4.0, 0.25, 1).unwrap();
        assert!(b.t_local <= a.t_local);
        assert!(local_constants(4.0, 0.0, 1).is_err());
        assert!(local_constants(4.0, 0.5, 0).is_err());
    }

    #[test]
    fn second_period_scales_m1() {
        let a = local_constants(2.0, 0.5, 1).unwrap();
        let b = local_constants(2.0, 0.5, 2).unwrap();
        assert!((b.m1 / a.m1 - 8.0 * b.z1 / a.z1).abs() < 1e-9 * b.m1 / a.m1);
        assert!(b.z1 >= a.z1);
    }

    #[test]
    fn trivial_zero_is_a_fixed_point() {
        let g = GridField::constant(vec![16], 2.0 * PI, Complex64::new(-2.0, 0.0)).unwrap();
        let c = constants_for(&g, 1).unwrap();
        let r = picard_local_solve(&g, &c, 5, &zeta_flow(1.0)).unwrap();
        assert!(r.field.sup_distance_to(Complex64::new(-2.0, 0.0)) < 1e-15);
        assert!(r.reached_roundoff);
    }

    #[test]
    fn admissibility_is_checked() {
        let g = GridField::constant(vec![16], 2.0 * PI, Complex64::new(3.0, 0.0)).unwrap();
        let c = local_constants(4.0, 0.5, 1).unwrap();
        assert!(picard_local_solve(&g, &c, 3, &zeta_flow(1.0)).is_err());
        let c = local_constants(6.0, 0.7, 1).unwrap();
        assert!(picard_local_solve(&g, &c, 3, &zeta_flow(1.0)).is_err());
    }
}
