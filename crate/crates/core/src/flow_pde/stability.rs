//! Attraction of disc data towards a sink of the nonlinearity.

use num_complex::Complex64;
use serde::Serialize;

use super::etd::{integrate_pde, PdeConfig, PdeTermination, StopNear};
use super::grid::GridField;
use crate::error::{Result, ZetaError};
use crate::flow_ode::ZeroRecord;

pub const CONVERGENCE_TOL: f64 = 1e-6;
/// Time allowed for non-mean Fourier modes to die out before monotonicity
/// of sup |u − z0| is required.
pub const TRANSIENT: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub target: Complex64,
    pub delta: f64,
    pub converged: bool,
    pub convergence_time: Option<f64>,
    pub initial_distance: f64,
    pub final_distance: f64,
    pub t_final: f64,
    /// sup |u − z0| never grew after `TRANSIENT`.
    pub monotone_after_transient: bool,
    pub worst_increase: f64,
    /// First time sup |u − z0| ≤ δe^{−tδ²/2}, and whether it stayed there.
    pub entered_shrinking_disc: Option<f64>,
    pub shrinking_disc_held: bool,
    /// Left D(z0, 2δ): a discrete counterexample to attraction.
    pub escaped: bool,
    pub max_distance: f64,
    pub termination: PdeTermination,
}

impl StabilityReport {
    pub fn is_clean(&self) -> bool {
        self.converged && self.monotone_after_transient && self.shrinking_disc_held && !self.escaped
    }
}

/// Integrates from `g` (inside D(z0, δ)) until sup |u − z0| < 1e-6 or t_end.
pub fn stability_experiment(
    z0: &ZeroRecord,
    delta: f64,
    g: &GridField,
    cfg: &PdeConfig,
) -> Result<StabilityReport> {
    if !z0.kind.is_sink() {
        return Err(ZetaError::Config(format!(
            "zero at {} is not a sink",
            z0.location
        )));
    }
    if !(delta > 0.0) {
        return Err(ZetaError::Config("delta must be positive".into()));
    }
    let target = z0.location;
    let d0 = g.sup_distance_to(target);
    if !(d0 < delta) {
        return Err(ZetaError::Config(format!(
            "datum leaves D(z0, {delta}): sup distance {d0}"
        )));
    }
    let mut run_cfg = cfg.clone();
    run_cfg.keep_fields = false;
    run_cfg.stop_near = Some(StopNear {
        target,
        tol: CONVERGENCE_TOL,
    });
    let run = integrate_pde(g, &run_cfg)?;

    let dist: Vec<(f64, f64)> = run
        .steps
        .iter()
        .map(|m| (m.t, m.distance.expect("distance tracked")))
        .collect();
    let radius = |t: f64| delta * (-t * delta * delta / 2.0).exp();
    let mut worst_increase: f64 = 0.0;
    for w in dist.windows(2) {
        if w[0].0 >= TRANSIENT {
            worst_increase = worst_increase.max(w[1].1 - w[0].1);
        }
    }
    let entered = dist.iter().find(|(t, d)| *d <= radius(*t)).map(|(t, _)| *t);
    let held = entered.is_none_or(|t0| {
        dist.iter()
            .filter(|(t, _)| *t >= t0)
            .all(|(t, d)| *d <= radius(*t) * (1.0 + 1e-9))
    });
    let max_distance = dist.iter().map(|p| p.1).fold(0.0, f64::max);
    let (t_final, final_distance) = *dist.last().expect("initial point present");
    let converged = final_distance < CONVERGENCE_TOL;
    Ok(StabilityReport {
        target,
        delta,
        converged,
        convergence_time: converged.then_some(t_final),
        initial_distance: d0,
        final_distance,
        t_final,
        monotone_after_transient: worst_increase <= 1e-12 + 1e-9 * d0,
        worst_increase,
        entered_shrinking_disc: entered,
        shrinking_disc_held: held,
        escaped: max_distance > 2.0 * delta,
        max_distance,
        termination: run.termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::LFunctionHandle;
    use crate::flow_ode::{classify_zero, FlowConfig};
    use crate::flow_pde::grid::InitialDatum;
    use crate::special::EvalConfig;
    use std::f64::consts::PI;

    fn setup(t_end: f64, dt: f64) -> (ZeroRecord, PdeConfig) {
        let cfg = EvalConfig::default();
        let z = classify_zero(Complex64::new(-2.0, 0.0), &cfg).unwrap();
        let flow = FlowConfig::new(LFunctionHandle::zeta(cfg).unwrap(), 1.0, t_end);
        (z, PdeConfig::new(flow, dt))
    }

    #[test]
    fn equilibrium_converges_at_once() {
        let (z, cfg) = setup(10.0, 0.1);
        let g = GridField::constant(vec![16], 2.0 * PI, z.location).unwrap();
        let rep = stability_experiment(&z, 0.05, &g, &cfg).unwrap();
        assert_eq!(rep.convergence_time, Some(0.0));
        assert!(rep.is_clean());
    }

    #[test]
    fn disc_datum_is_drawn_in() {
        let (z, cfg) = setup(30.0, 0.1);
        let g = InitialDatum::DiscRandom {
            center: [-2.0, 0.0],
            radius: 0.05,
            seed: 2,
            modes: 3,
            fraction: 0.9,
            real: false,
        }
        .build(vec![16], 2.0 * PI)
        .unwrap();
        let rep = stability_experiment(&z, 0.05, &g, &cfg).unwrap();
        assert!(!rep.escaped);
        assert!(rep.monotone_after_transient, "{rep:?}");
        assert!(rep.shrinking_disc_held);
        assert!(rep.final_distance < rep.initial_distance * 0.5);
    }

    #[test]
    fn rejects_sources_and_outside_data() {
        let (_, cfg) = setup(1.0, 0.1);
        let src = classify_zero(Complex64::new(-4.0, 0.0), &EvalConfig::default()).unwrap();
        let g = GridField::constant(vec![16], 2.0 * PI, src.location).unwrap();
        assert!(stability_experiment(&src, 0.05, &g, &cfg).is_err());
        let (z, cfg) = setup(1.0, 0.1);
        let g = GridField::constant(vec![16], 2.0 * PI, Complex64::new(-1.9, 0.0)).unwrap();
        assert!(stability_experiment(&z, 0.05, &g, &cfg).is_err());
    }
}
