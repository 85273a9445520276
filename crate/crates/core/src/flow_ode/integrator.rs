//! Dormand–Prince 5(4) integration of s′ = λF(s) on complex scalars.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dirichlet::LFunctionHandle;
use crate::error::{Result, ZetaError};
use crate::output::complex_series_csv;

/// Solver settings for the scalar flow.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    /// Sign of the nonlinearity, ±1.
    pub lambda: f64,
    pub nonlinearity: LFunctionHandle,
    pub rtol: f64,
    pub atol: f64,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub t_end: f64,
    /// Minimal allowed P(s) = |Re s − 1| + |Im s| when F has a pole.
    pub pole_guard_eps: f64,
}

impl FlowConfig {
    pub fn new(nonlinearity: LFunctionHandle, lambda: f64, t_end: f64) -> Self {
        FlowConfig {
            lambda,
            nonlinearity,
            rtol: 1e-10,
            atol: 1e-12,
            dt_init: 1e-3,
            dt_min: 1e-12,
            dt_max: 10.0,
            t_end,
            pole_guard_eps: 1e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda != 1.0 && self.lambda != -1.0 {
            return Err(ZetaError::Config(format!(
                "lambda must be +1 or -1, got {}",
                self.lambda
            )));
        }
        if !(self.pole_guard_eps > 0.0) {
            return Err(ZetaError::Config("pole_guard_eps must be positive".into()));
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_init && self.dt_init <= self.dt_max) {
            return Err(ZetaError::Config(
                "need 0 < dt_min <= dt_init <= dt_max".into(),
            ));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(ZetaError::Config("tolerances must be positive".into()));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(ZetaError::Config(
                "t_end must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }

    /// λF(s).
    pub fn field(&self, s: Complex64) -> Result<Complex64> {
        Ok(self.lambda * self.nonlinearity.eval(s)?)
    }
}

/// Pole-proximity functional P(s) = |Re s − 1| + |Im s|.
pub fn pole_distance(s: Complex64) -> f64 {
    (s.re - 1.0).abs() + s.im.abs()
}

pub const ESCAPE_NORM: f64 = 1e6;
const CONVERGED_STEPS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "reason")]
pub enum Termination {
    Completed,
    PoleProximity,
    NormEscape,
    /// |F| stayed below atol for ten accepted steps; `limit` is the zero
    /// found by Newton from the final state, if within 0.1 of it.
    Converged {
        limit: Option<Complex64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<(f64, Complex64)>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn last(&self) -> (f64, Complex64) {
        *self
            .points
            .last()
            .expect("trajectory holds the initial point")
    }

    /// CSV rows `t,re,im`.
    pub fn to_csv(&self) -> String {
        complex_series_csv("t,re,im", self.points.iter().map(|(t, z)| (*t, z)))
    }
}

// Dormand–Prince 5(4) tableau; nodes are implicit in the row sums of A.

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

enum StepOutcome {
    Accepted {
        y: Complex64,
        err: f64,
        k_last: Complex64,
    },
    Rejected {
        err: f64,
    },
}

fn try_step(cfg: &FlowConfig, y: Complex64, k1: Complex64, h: f64) -> Result<StepOutcome> {
    let mut k = [Complex64::new(0.0, 0.0); 7];
    k[0] = k1;
    for i in 1..7 {
        let mut yi = y;
        for j in 0..i {
            yi += h * A[i][j] * k[j];
        }
        k[i] = match cfg.field(yi) {
            Ok(v) => v,
            Err(ZetaError::Pole) => return Ok(StepOutcome::Rejected { err: f64::INFINITY }),
            Err(e) => return Err(e),
        };
    }
    let mut y5 = y;
    let mut y4 = y;
    for i in 0..7 {
        y5 += h * B5[i] * k[i];
        y4 += h * B4[i] * k[i];
    }
    let scale = cfg.atol + cfg.rtol * y.norm().max(y5.norm());
    let err = (y5 - y4).norm() / scale;
    if !err.is_finite() || !y5.re.is_finite() || !y5.im.is_finite() {
        return Ok(StepOutcome::Rejected { err: f64::INFINITY });
    }
    if err <= 1.0 {
        Ok(StepOutcome::Accepted {
            y: y5,
            err,
            k_last: k[6],
        })
    } else {
        Ok(StepOutcome::Rejected { err })
    }
}

/// Integrates s′ = λF(s) from s0, recording every accepted step, and
/// additionally landing exactly on each time in `outputs` (sorted).
pub fn integrate_flow_sampled(
    cfg: &FlowConfig,
    s0: Complex64,
    outputs: &[f64],
) -> Result<Trajectory> {
    cfg.validate()?;
    let has_pole = cfg.nonlinearity.has_pole();
    if has_pole && pole_distance(s0) <= cfg.pole_guard_eps {
        return Err(ZetaError::Domain(format!(
            "initial point {s0} lies within the pole guard"
        )));
    }
    let mut t = 0.0;
    let mut y = s0;
    let mut points = vec![(t, y)];
    let mut k1 = cfg.field(y)?;
    let mut h = cfg.dt_init.min(cfg.dt_max);
    let mut err_prev: f64 = 1.0;
    let mut small_run = 0usize;
    let mut next_out = outputs.iter().copied().filter(|&o| o > 0.0).peekable();

    let termination = loop {
        if t >= cfg.t_end {
            break Termination::Completed;
        }
        let mut target = cfg.t_end;
        if let Some(&o) = next_out.peek() {
            target = target.min(o);
        }
        let h_try = h.min(target - t);
        let landing = h_try == target - t;
        match try_step(cfg, y, k1, h_try)? {
            StepOutcome::Accepted {
                y: y_new,
                err,
                k_last,
            } => {
                t = if landing { target } else { t + h_try };
                y = y_new;
                k1 = k_last;
                points.push((t, y));
                if landing && next_out.peek() == Some(&t) {
                    next_out.next();
                }
                let err = err.max(1e-10);
                let factor = 0.9 * err.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
                err_prev = err;
                if !landing || h_try >= h {
                    h = (h_try * factor.clamp(0.2, 5.0)).clamp(cfg.dt_min, cfg.dt_max);
                }
                if has_pole && pole_distance(y) < cfg.pole_guard_eps {
                    break Termination::PoleProximity;
                }
                if y.norm() > ESCAPE_NORM {
                    break Termination::NormEscape;
                }
                if k1.norm() < cfg.atol {
                    small_run += 1;
                    if small_run >= CONVERGED_STEPS {
                        let limit = newton_zero(&cfg.nonlinearity, y, 0.1);
                        break Termination::Converged { limit };
                    }
                } else {
                    small_run = 0;
                }
            }
            StepOutcome::Rejected { err } => {
                if h_try <= cfg.dt_min {
                    if has_pole && pole_distance(y) < 10.0 * cfg.pole_guard_eps {
                        break Termination::PoleProximity;
                    }
                    return Err(ZetaError::Stiffness { t, state: y });
                }
                let factor = if err.is_finite() {
                    0.9 * err.powf(-0.2)
                } else {
                    0.1
                };
                h = (h_try * factor.clamp(0.1, 0.5)).max(cfg.dt_min);
            }
        }
    };
    Ok(Trajectory {
        points,
        termination,
    })
}

/// Integrates s′ = λF(s) from s0 to `cfg.t_end` or an early stop.
pub fn integrate_flow(cfg: &FlowConfig, s0: Complex64) -> Result<Trajectory> {
    integrate_flow_sampled(cfg, s0, &[])
}

/// Newton iteration for a zero of F from `start`; returns it only if it
/// converges within `radius` of `start`.
pub fn newton_zero(l: &LFunctionHandle, start: Complex64, radius: f64) -> Option<Complex64> {
    let mut z = start;
    for _ in 0..50 {
        let f = l.eval(z).ok()?;
        let d = l.deriv(z).ok()?;
        if d.norm() == 0.0 {
            return None;
        }
        let step = f / d;
        z -= step;
        if (z - start).norm() > radius {
            return None;
        }
        if step.norm() < 1e-14 * z.norm().max(1.0) {
            break;
        }
    }
    let r = l.eval(z).ok()?;
    (r.norm() < 1e-9).then_some(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::EvalConfig;

    fn cfg(lambda: f64, t_end: f64) -> FlowConfig {
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
    fn config_validation() {
        let mut f = cfg(1.0, 1.0);
        f.lambda = 0.5;
        assert!(f.validate().is_err());
        let mut f = cfg(1.0, 1.0);
        f.dt_min = 1.0;
        assert!(f.validate().is_err());
    }

    #[test]
    fn exponential_growth_against_closed_form() {
        // F = ζ near s = 9 is ≈ 1; compare with a tiny step reference
        let f = cfg(1.0, 0.5);
        let tr = integrate_flow_sampled(&f, c(9.0, 0.0), &[0.25]).unwrap();
        assert!(tr.points.iter().any(|p| p.0 == 0.25));
        assert_eq!(tr.termination, Termination::Completed);
        assert_eq!(tr.last().0, 0.5);
        // ζ(s) − 1 ≤ 2^{−9}·1.01 on [9, 9.6], so s(0.5) − 9.5 is tiny and positive
        let d = tr.last().1.re - 9.5;
        assert!(d > 0.0 && d < 0.5 * 2f64.powi(-9) * 1.02);
    }

    #[test]
    fn trivial_zero_is_fixed() {
        let tr = integrate_flow(&cfg(1.0, 50.0), c(-4.0, 0.0)).unwrap();
        assert!(tr.points.iter().all(|p| (p.1 - c(-4.0, 0.0)).norm() < 1e-8));
    }

    #[test]
    fn pole_is_reached_under_negative_lambda() {
        let tr = integrate_flow(&cfg(-1.0, 10.0), c(0.5, 0.0)).unwrap();
        assert_eq!(tr.termination, Termination::PoleProximity);
        assert!(pole_distance(tr.last().1) < 1e-3);
    }

    #[test]
    fn start_inside_guard_is_rejected() {
        assert!(integrate_flow(&cfg(1.0, 1.0), c(1.0, 1e-4)).is_err());
    }

    #[test]
    fn converges_to_minus_two() {
        let tr = integrate_flow(&cfg(1.0, 5000.0), c(-3.0, 0.0)).unwrap();
        match tr.termination {
            Termination::Converged { limit: Some(z) } => assert!((z - c(-2.0, 0.0)).norm() < 1e-10),
            other => panic!("{other:?}"),
        }
        assert!((tr.last().1.re + 2.0).abs() < 1e-6);
    }
}
