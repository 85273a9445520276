//! Exponential time differencing (ETD-RK2) for ∂ₜu = Δu + λL(u) on the torus.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{GridField, Spectral};
use crate::error::{Result, ZetaError};
use crate::flow_ode::{pole_distance, FlowConfig, ESCAPE_NORM};

const PHI_SERIES_RADIUS: f64 = 0.1;
const PHI_SERIES_TERMS: i32 = 12;

/// φ₁(z) = (e^z − 1)/z.
pub fn phi1(z: f64) -> f64 {
    if z.abs() < PHI_SERIES_RADIUS {
        phi_series(z, 1)
    } else {
        z.exp_m1() / z
    }
}

/// φ₂(z) = (e^z − 1 − z)/z².
pub fn phi2(z: f64) -> f64 {
    if z.abs() < PHI_SERIES_RADIUS {
        phi_series(z, 2)
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

/// Σ_j z^j/(j + shift)!, summed from the smallest term.
fn phi_series(z: f64, shift: i32) -> f64 {
    let mut terms = Vec::with_capacity(PHI_SERIES_TERMS as usize);
    let mut t = (1..=shift).map(f64::from).product::<f64>().recip();
    for j in 0..PHI_SERIES_TERMS {
        terms.push(t);
        t *= z / f64::from(j + shift + 1);
    }
    terms.iter().rev().sum()
}

/// λL(u) pointwise; refuses points within the pole guard.
fn reaction(u: &[Complex64], flow: &FlowConfig) -> Result<Vec<Complex64>> {
    if flow.nonlinearity.has_pole() {
        if let Some((index, &value)) = u
            .iter()
            .enumerate()
            .find(|(_, v)| pole_distance(**v) < flow.pole_guard_eps)
        {
            return Err(ZetaError::Quench { index, value });
        }
    }
    if u.iter().all(|v| *v == u[0]) {
        return Ok(vec![flow.field(u[0])?; u.len()]);
    }
    u.par_iter().map(|&v| flow.field(v)).collect()
}

/// Fourier multipliers for one step size.
#[derive(Debug, Clone)]
pub struct EtdStepper {
    spectral: Spectral,
    dt: f64,
    decay: Vec<f64>,
    phi1: Vec<f64>,
    phi2: Vec<f64>,
}

impl EtdStepper {
    pub fn new(field: &GridField, dt: f64) -> Self {
        let mut s = EtdStepper {
            spectral: Spectral::new(field),
            dt: f64::NAN,
            decay: Vec::new(),
            phi1: Vec::new(),
            phi2: Vec::new(),
        };
        s.set_dt(dt);
        s
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn set_dt(&mut self, dt: f64) {
        if dt == self.dt {
            return;
        }
        self.dt = dt;
        let z: Vec<f64> = self.spectral.k2().iter().map(|k2| -k2 * dt).collect();
        self.decay = z.iter().map(|z| z.exp()).collect();
        self.phi1 = z.iter().map(|&z| phi1(z)).collect();
        self.phi2 = z.iter().map(|&z| phi2(z)).collect();
    }

    /// One ETD-RK2 step:
    /// a = e^{hΔ}u + hφ₁(hΔ)N(u), u⁺ = a + hφ₂(hΔ)(N(a) − N(u)).
    pub fn step(&self, u: &[Complex64], flow: &FlowConfig) -> Result<Vec<Complex64>> {
        let h = self.dt;
        let n0 = reaction(u, flow)?;
        if u.iter().all(|v| *v == u[0]) {
            // Spatially constant data see no diffusion; φ₁(0) = 1, φ₂(0) = 1/2.
            let a = u[0] + h * n0[0];
            let n1 = reaction(&[a], flow)?;
            return Ok(vec![a + 0.5 * h * (n1[0] - n0[0]); u.len()]);
        }
        let uh = self.spectral.forward(u);
        let n0h = self.spectral.forward(&n0);
        let ah: Vec<Complex64> = (0..u.len())
            .map(|k| self.decay[k] * uh[k] + h * self.phi1[k] * n0h[k])
            .collect();
        let a = self.spectral.inverse(&ah);
        let n1h = self.spectral.forward(&reaction(&a, flow)?);
        let next: Vec<Complex64> = (0..u.len())
            .map(|k| ah[k] + h * self.phi2[k] * (n1h[k] - n0h[k]))
            .collect();
        Ok(self.spectral.inverse(&next))
    }
}

/// A single ETD-RK2 step of size `dt` from `field`.
pub fn etd_step(field: &GridField, dt: f64, flow: &FlowConfig) -> Result<GridField> {
    if !(dt > 0.0) {
        return Err(ZetaError::Config(format!("dt must be positive, got {dt}")));
    }
    let stepper = EtdStepper::new(field, dt);
    let next = stepper.step(field.values(), flow)?;
    field.with_values(next, field.time + dt)
}

/// Early stop once sup |u − target| < tol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopNear {
    pub target: Complex64,
    pub tol: f64,
}

/// Grid march settings; the nonlinearity, λ, t_end and pole guard come
/// from `flow`.
#[derive(Debug, Clone)]
pub struct PdeConfig {
    pub flow: FlowConfig,
    pub dt: f64,
    pub dt_min: f64,
    pub escape_norm: f64,
    /// Near the pole the step is capped at this factor times (min P)².
    pub pole_dt_factor: f64,
    /// Snapshot every this many accepted steps; derived from t_end/dt when None.
    pub snapshot_every: Option<usize>,
    pub keep_fields: bool,
    pub stop_near: Option<StopNear>,
    /// Distance monitored per step, independent of early stopping.
    pub track_distance_to: Option<Complex64>,
}

impl PdeConfig {
    pub fn new(flow: FlowConfig, dt: f64) -> Self {
        PdeConfig {
            flow,
            dt,
            dt_min: 1e-12,
            escape_norm: ESCAPE_NORM,
            pole_dt_factor: 0.05,
            snapshot_every: None,
            keep_fields: true,
            stop_near: None,
            track_distance_to: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.flow.validate()?;
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(ZetaError::Config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt) {
            return Err(ZetaError::Config("need 0 < dt_min <= dt".into()));
        }
        if !(self.escape_norm > 0.0 && self.pole_dt_factor > 0.0) {
            return Err(ZetaError::Config(
                "escape_norm and pole_dt_factor must be positive".into(),
            ));
        }
        if self.snapshot_every == Some(0) {
            return Err(ZetaError::Config(
                "snapshot_every must be at least 1".into(),
            ));
        }
        if let Some(s) = self.stop_near {
            if !(s.tol > 0.0) {
                return Err(ZetaError::Config("stop tolerance must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn snapshot_cadence(&self) -> usize {
        self.snapshot_every
            .unwrap_or_else(|| ((self.flow.t_end / self.dt / 200.0).floor() as usize).max(1))
    }
}

/// Monitor values after one accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepMonitor {
    pub t: f64,
    pub dt: f64,
    pub min_p: f64,
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub sup_abs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
}

impl StepMonitor {
    fn of(field: &GridField, dt: f64, target: Option<Complex64>) -> Self {
        let (re_min, re_max, im_min, im_max) = field.extrema();
        StepMonitor {
            t: field.time,
            dt,
            min_p: field.min_pole_distance().1,
            re_min,
            re_max,
            im_min,
            im_max,
            sup_abs: field.sup_abs(),
            distance: target.map(|z| field.sup_distance_to(z)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub monitor: StepMonitor,
    #[serde(skip)]
    pub field: Option<GridField>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "reason")]
pub enum PdeTermination {
    Completed,
    /// min P fell below the pole guard; `index`/`value` locate the offender.
    Quenched {
        t: f64,
        index: usize,
        value: Complex64,
    },
    Escaped {
        t: f64,
    },
    /// Early stop requested through `stop_near`.
    Converged {
        t: f64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub termination: PdeTermination,
    pub steps: Vec<StepMonitor>,
    pub snapshots: Vec<Snapshot>,
    pub rejected_steps: usize,
    #[serde(skip)]
    pub final_field: GridField,
}

impl RunRecord {
    pub fn final_time(&self) -> f64 {
        self.final_field.time
    }

    pub fn initial_field(&self) -> Option<&GridField> {
        self.snapshots.first().and_then(|s| s.field.as_ref())
    }

    /// JSON with termination, per-step monitors and per-snapshot extrema.
    pub fn metadata_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Marches ETD-RK2 from `g` to `cfg.flow.t_end` or an early stop.
pub fn integrate_pde(g: &GridField, cfg: &PdeConfig) -> Result<RunRecord> {
    cfg.validate()?;
    let flow = &cfg.flow;
    let has_pole = flow.nonlinearity.has_pole();
    let (_, p0) = g.min_pole_distance();
    if has_pole && !(p0 > 0.0) {
        return Err(ZetaError::Config("initial datum touches the pole".into()));
    }
    let target = cfg.stop_near.map(|s| s.target).or(cfg.track_distance_to);
    let cadence = cfg.snapshot_cadence();

    let mut u = g.clone();
    let first = StepMonitor::of(&u, 0.0, target);
    let mut steps = vec![first];
    let mut snapshots = vec![Snapshot {
        monitor: first,
        field: cfg.keep_fields.then(|| u.clone()),
    }];
    let mut stepper = EtdStepper::new(&u, cfg.dt);
    let mut rejected = 0;
    let mut accepted = 0usize;
    let t_end = flow.t_end;

    let finish = |u: GridField,
                  steps: Vec<StepMonitor>,
                  mut snapshots: Vec<Snapshot>,
                  term: PdeTermination,
                  rejected: usize| {
        let last = steps.last().expect("run holds the initial monitor");
        if snapshots.last().map(|s| s.monitor.t) != Some(last.t) {
            snapshots.push(Snapshot {
                monitor: *last,
                field: cfg.keep_fields.then(|| u.clone()),
            });
        }
        RunRecord {
            termination: term,
            steps,
            snapshots,
            rejected_steps: rejected,
            final_field: u,
        }
    };

    if let Some(s) = cfg.stop_near {
        if first.distance.unwrap_or(f64::INFINITY) < s.tol {
            return Ok(finish(
                u,
                steps,
                snapshots,
                PdeTermination::Converged { t: 0.0 },
                0,
            ));
        }
    }

    while u.time < t_end {
        let (_, pmin) = u.min_pole_distance();
        let mut h = cfg.dt.min(t_end - u.time);
        if has_pole {
            h = h.min(cfg.pole_dt_factor * pmin * pmin);
        }
        let next = loop {
            stepper.set_dt(h);
            let attempt = stepper.step(u.values(), flow);
            let ok = match &attempt {
                Ok(v) => {
                    let finite = v.iter().all(|z| z.re.is_finite() && z.im.is_finite());
                    let overshoot = has_pole
                        && finite
                        && v.iter()
                            .map(|z| pole_distance(*z))
                            .fold(f64::INFINITY, f64::min)
                            < 0.25 * pmin;
                    finite && !overshoot
                }
                Err(ZetaError::Quench { .. }) => false,
                Err(e) => return Err(e.clone()),
            };
            if ok {
                break attempt?;
            }
            if let Err(ZetaError::Quench { index, value }) = &attempt {
                if pmin < 2.0 * flow.pole_guard_eps {
                    let (index, value) = (*index, *value);
                    let term = PdeTermination::Quenched {
                        t: u.time,
                        index,
                        value,
                    };
                    return Ok(finish(u, steps, snapshots, term, rejected));
                }
            }
            rejected += 1;
            h *= 0.5;
            if h < cfg.dt_min {
                return match attempt {
                    Ok(_) => Err(ZetaError::FieldFailure {
                        t: u.time,
                        reason: "non-finite values under step refinement".into(),
                        last_valid: Box::new(u),
                    }),
                    Err(ZetaError::Quench { index, value }) => {
                        let term = PdeTermination::Quenched {
                            t: u.time,
                            index,
                            value,
                        };
                        Ok(finish(u, steps, snapshots, term, rejected))
                    }
                    Err(e) => Err(e),
                };
            }
        };
        let t_next = if t_end - (u.time + h) < 1e-12 * t_end.max(1.0) {
            t_end
        } else {
            u.time + h
        };
        u = u.same_grid(next, t_next);
        accepted += 1;
        let mon = StepMonitor::of(&u, h, target);
        steps.push(mon);
        if accepted.is_multiple_of(cadence) {
            snapshots.push(Snapshot {
                monitor: mon,
                field: cfg.keep_fields.then(|| u.clone()),
            });
        }
        if has_pole && mon.min_p < flow.pole_guard_eps {
            let (index, _) = u.min_pole_distance();
            let term = PdeTermination::Quenched {
                t: u.time,
                index,
                value: u.values()[index],
            };
            return Ok(finish(u, steps, snapshots, term, rejected));
        }
        if mon.sup_abs > cfg.escape_norm {
            let term = PdeTermination::Escaped { t: u.time };
            return Ok(finish(u, steps, snapshots, term, rejected));
        }
        if let (Some(s), Some(d)) = (cfg.stop_near, mon.distance) {
            if d < s.tol {
                let term = PdeTermination::Converged { t: u.time };
                return Ok(finish(u, steps, snapshots, term, rejected));
            }
        }
    }
    Ok(finish(
        u,
        steps,
        snapshots,
        PdeTermination::Completed,
        rejected,
    ))
}

/// Estimated discretization error of a run at step `cfg.dt`: the final
/// fields at dt and dt/2 differ by about 3/4 of the coarse error.
pub fn self_convergence_estimate(g: &GridField, cfg: &PdeConfig) -> Result<f64> {
    let mut coarse = cfg.clone();
    coarse.keep_fields = false;
    coarse.stop_near = None;
    let mut fine = coarse.clone();
    fine.dt = cfg.dt / 2.0;
    fine.dt_min = fine.dt_min.min(fine.dt);
    let a = integrate_pde(g, &coarse)?;
    let b = integrate_pde(g, &fine)?;
    let t = a.final_time().min(b.final_time());
    if (a.final_time() - b.final_time()).abs() > 1e-9 * t.max(1.0) {
        return Err(ZetaError::Numerical {
            t,
            reason: "runs at dt and dt/2 stopped at different times".into(),
        });
    }
    Ok(a.final_field.sup_difference(&b.final_field) * 4.0 / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::LFunctionHandle;
    use crate::flow_pde::grid::InitialDatum;
    use crate::special::EvalConfig;
    use std::f64::consts::PI;

    fn zeta_flow(lambda: f64, t_end: f64) -> FlowConfig {
        FlowConfig::new(
            LFunctionHandle::zeta(EvalConfig::default()).unwrap(),
            lambda,
            t_end,
        )
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn phi_functions_match_closed_forms() {
        for z in [-1e-8f64, -1e-3, -0.05, -0.099, -0.11, -1.0, -40.0] {
            let p1 = z.exp_m1() / z;
            let p2 = (z.exp() - 1.0 - z) / (z * z);
            assert!((phi1(z) - p1).abs() < 1e-15, "{z}");
            if z.abs() > 1e-2 {
                assert!((phi2(z) - p2).abs() < 1e-13, "{z}");
            }
        }
        assert_eq!(phi1(0.0), 1.0);
        assert_eq!(phi2(0.0), 0.5);
        assert!((phi2(-1e-9) - (0.5 - 1e-9 / 6.0)).abs() < 1e-17);
    }

    #[test]
    fn constant_step_is_heun() {
        let flow = zeta_flow(1.0, 1.0);
        let g = GridField::constant(vec![16], 2.0 * PI, c(2.0, 0.5)).unwrap();
        let h = 0.01;
        let u = etd_step(&g, h, &flow).unwrap();
        let s = c(2.0, 0.5);
        let k1 = flow.field(s).unwrap();
        let k2 = flow.field(s + h * k1).unwrap();
        let heun = s + 0.5 * h * (k1 + k2);
        assert!(u.values().iter().all(|v| *v == u.values()[0]));
        assert!((u.values()[0] - heun).norm() < 1e-15);
        assert_eq!(u.time, h);
    }

    #[test]
    fn trivial_zero_is_an_equilibrium() {
        for lambda in [1.0, -1.0] {
            let g = GridField::constant(vec![32], 2.0 * PI, c(-2.0, 0.0)).unwrap();
            let u = etd_step(&g, 0.1, &zeta_flow(lambda, 1.0)).unwrap();
            assert!(u.sup_distance_to(c(-2.0, 0.0)) < 1e-15);
        }
    }

    #[test]
    fn guard_reports_offending_point() {
        let mut v = vec![c(3.0, 0.0); 16];
        v[5] = c(1.0005, 0.0);
        let g = GridField::new(vec![16], 2.0 * PI, v).unwrap();
        match etd_step(&g, 0.01, &zeta_flow(1.0, 1.0)) {
            Err(ZetaError::Quench { index, value }) => {
                assert_eq!(index, 5);
                assert_eq!(value, c(1.0005, 0.0));
            }
            other => panic!("expected quench, got {other:?}"),
        }
    }

    #[test]
    fn second_order_in_time() {
        let g = InitialDatum::FourierModes {
            mean: [3.0, 0.2],
            modes: vec![super::super::grid::FourierMode {
                k: vec![1],
                amp: [0.5, 0.1],
                phase: 0.3,
            }],
        }
        .build(vec![16], 2.0 * PI)
        .unwrap();
        let run = |dt: f64| {
            let mut cfg = PdeConfig::new(zeta_flow(1.0, 0.4), dt);
            cfg.keep_fields = false;
            integrate_pde(&g, &cfg).unwrap().final_field
        };
        let reference = run(0.4 / 256.0);
        let e1 = run(0.05).sup_difference(&reference);
        let e2 = run(0.025).sup_difference(&reference);
        let ratio = e1 / e2;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn lambda_minus_one_half_quenches() {
        let g = GridField::constant(vec![16], 2.0 * PI, c(0.5, 0.0)).unwrap();
        let cfg = PdeConfig::new(zeta_flow(-1.0, 5.0), 1e-2);
        let run = integrate_pde(&g, &cfg).unwrap();
        let PdeTermination::Quenched { t, value, .. } = run.termination else {
            panic!("{:?}", run.termination);
        };
        assert!(t > 0.0 && t < 1.0);
        assert!(pole_distance(value) < cfg.flow.pole_guard_eps);
        assert_eq!(run.snapshots.last().unwrap().monitor.t, t);
    }

    #[test]
    fn snapshots_follow_cadence_and_land_on_t_end() {
        let g = GridField::constant(vec![16], 2.0 * PI, c(3.0, 0.0)).unwrap();
        let cfg = PdeConfig::new(zeta_flow(1.0, 1.0), 1e-3);
        assert_eq!(cfg.snapshot_cadence(), 5);
        let run = integrate_pde(&g, &cfg).unwrap();
        assert_eq!(run.termination, PdeTermination::Completed);
        assert_eq!(run.final_time(), 1.0);
        assert_eq!(run.snapshots.len(), 201);
        assert_eq!(run.steps.len(), 1001);
        let json = run.metadata_json().unwrap();
        assert!(json.contains("\"reason\": \"completed\""));
    }

    #[test]
    fn converged_stop_and_rejections() {
        let g = GridField::constant(vec![16], 2.0 * PI, c(-2.0, 0.0)).unwrap();
        let mut cfg = PdeConfig::new(zeta_flow(1.0, 1.0), 0.1);
        cfg.stop_near = Some(StopNear {
            target: c(-2.0, 0.0),
            tol: 1e-6,
        });
        let run = integrate_pde(&g, &cfg).unwrap();
        assert_eq!(run.termination, PdeTermination::Converged { t: 0.0 });
        cfg.dt = 0.0;
        assert!(integrate_pde(&g, &cfg).is_err());
    }
}
