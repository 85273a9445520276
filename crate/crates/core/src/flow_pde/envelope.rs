//! Comparison-principle envelopes checked against stored PDE snapshots.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::etd::{PdeTermination, RunRecord};
use super::grid::GridField;
use crate::dirichlet::sigma1_root;
use crate::error::{Result, ZetaError};
use crate::flow_ode::FlowConfig;
use crate::special::riemann_zeta;

const REAL_TOL: f64 = 1e-12;

/// The envelope or qualitative statement a run is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Check {
    /// Affine bounds on u₁ and u₂ for the principal character, right of σ₁.
    PrincipalStrip,
    /// Same u₁ bounds and 0 < u₂ for real characters with I₂ > 0.
    RealCharacterStrip,
    /// Real data above the pole: t + I ≤ u ≤ ζ(I)t + S.
    RealAbovePole,
    /// Real data below the pole stay between consecutive trivial zeros.
    RealBetweenZeros,
    /// Real data in cells (−4n, −4n+4) end near the sinks −4n+2.
    RealLimitCells,
    /// Data in a small disc about a sink stay in it and are drawn in.
    SinkAttraction,
    /// With λ = −1, real data quench or stay global depending on their range.
    Quenching,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::PrincipalStrip,
        Check::RealCharacterStrip,
        Check::RealAbovePole,
        Check::RealBetweenZeros,
        Check::RealLimitCells,
        Check::SinkAttraction,
        Check::Quenching,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Check::PrincipalStrip => "thm1.5",
            Check::RealCharacterStrip => "cor1.6",
            Check::RealAbovePole => "thm1.7i",
            Check::RealBetweenZeros => "thm1.7ii",
            Check::RealLimitCells => "thm1.7iii",
            Check::SinkAttraction => "thm1.8",
            Check::Quenching => "thm1.9",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Check {
    type Err = ZetaError;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| ZetaError::Config(format!("unknown check id {s:?}")))
    }
}

/// Extrema of the datum and the derived envelope parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeParams {
    pub i1: f64,
    pub s1: f64,
    pub i2: f64,
    pub s2: f64,
    /// inf |g − 1| over the grid.
    pub dist_to_one: f64,
    pub real: bool,
    pub lambda: f64,
    pub period: usize,
    pub principal: bool,
    pub real_character: bool,
    /// Root of ζ(σ) = 2, used as a certified upper bound for σ₀.
    pub sigma1: f64,
    /// ζ(I₁) when I₁ > 1.
    pub zeta_i1: Option<f64>,
    /// −2k₁ = max{−2k ≤ I}.
    pub lower_zero: f64,
    /// −2k₂ = min{−2k ≥ S} when S ≤ −2, otherwise S.
    pub upper_zero: f64,
    /// n with I ∈ (−4n, −4n+4), and likewise for S.
    pub n1: Option<i64>,
    pub n2: Option<i64>,
    /// Sink and disc radius for the attraction check.
    pub sink: Option<(Complex64, f64)>,
}

fn cell_index(x: f64) -> Option<i64> {
    if x >= 0.0 || (x / 4.0).fract() == 0.0 {
        return None;
    }
    Some((-x / 4.0).ceil() as i64)
}

impl EnvelopeParams {
    pub fn from_field(g: &GridField, flow: &FlowConfig) -> Result<Self> {
        let (i1, s1, i2, s2) = g.extrema();
        let cfg = flow.nonlinearity.eval_cfg();
        let zeta_i1 = if i1 > 1.0 {
            Some(riemann_zeta(Complex64::new(i1, 0.0), cfg)?.re)
        } else {
            None
        };
        let dist_to_one = g
            .values()
            .iter()
            .map(|v| (v - 1.0).norm())
            .fold(f64::INFINITY, f64::min);
        let k1 = ((-i1 / 2.0).ceil()).max(1.0);
        let upper_zero = if s1 <= -2.0 {
            2.0 * (s1 / 2.0).ceil()
        } else {
            s1
        };
        let ch = flow.nonlinearity.character();
        Ok(EnvelopeParams {
            i1,
            s1,
            i2,
            s2,
            dist_to_one,
            real: g.is_real(REAL_TOL),
            lambda: flow.lambda,
            period: flow.nonlinearity.period(),
            principal: ch.is_principal(),
            real_character: ch.is_real(),
            sigma1: sigma1_root(cfg)? + 1e-8,
            zeta_i1,
            lower_zero: -2.0 * k1,
            upper_zero,
            n1: cell_index(i1),
            n2: cell_index(s1),
            sink: None,
        })
    }

    pub fn with_sink(mut self, z0: Complex64, delta: f64) -> Self {
        self.sink = Some((z0, delta));
        self
    }

    /// I and S for real data.
    pub fn real_range(&self) -> (f64, f64) {
        (self.i1, self.s1)
    }

    fn require(&self, cond: bool, what: &str) -> Result<()> {
        if cond {
            Ok(())
        } else {
            Err(ZetaError::Config(format!("hypothesis not met: {what}")))
        }
    }

    /// Checks the hypotheses of `check` against the datum extrema.
    pub fn check_hypotheses(&self, check: Check) -> Result<()> {
        let zeta_only = self.period == 1;
        match check {
            Check::PrincipalStrip => {
                self.require(self.lambda == 1.0, "lambda = +1")?;
                self.require(self.principal, "principal character")?;
                self.require(self.i1 > self.sigma1.max(1.0), "inf u1 > max(1, sigma1)")
            }
            Check::RealCharacterStrip => {
                self.require(self.lambda == 1.0, "lambda = +1")?;
                self.require(self.real_character, "real-valued character")?;
                self.require(self.i1 >= self.sigma1.max(1.0), "inf u1 >= max(1, sigma1)")?;
                self.require(self.i2 > 0.0, "inf u2 > 0")
            }
            Check::RealAbovePole | Check::RealBetweenZeros | Check::RealLimitCells => {
                self.require(zeta_only, "nonlinearity is zeta")?;
                self.require(self.lambda == 1.0, "lambda = +1")?;
                self.require(self.real, "real-valued datum")?;
                self.require(self.dist_to_one > 0.0, "inf |g - 1| > 0")?;
                match check {
                    Check::RealAbovePole => self.require(self.i1 > 1.0, "I > 1"),
                    Check::RealBetweenZeros => self.require(self.s1 < 1.0, "S < 1"),
                    _ => self.require(
                        self.n1.is_some() && self.n2.is_some(),
                        "I and S inside open cells (-4n, -4n+4)",
                    ),
                }
            }
            Check::SinkAttraction => {
                self.require(self.sink.is_some(), "sink and disc radius given")?;
                self.require(self.lambda == 1.0, "lambda = +1")
            }
            Check::Quenching => {
                self.require(zeta_only, "nonlinearity is zeta")?;
                self.require(self.lambda == -1.0, "lambda = -1")?;
                self.require(self.real, "real-valued datum")?;
                self.require(
                    self.i1 > 1.0 || (-2.0 < self.i1 && self.s1 < 1.0) || self.s1 < -2.0,
                    "I > 1, -2 < I <= S < 1, or S < -2",
                )
            }
        }
    }

    /// Whether the quenching statement predicts blow-up (vs a global solution).
    pub fn predicts_quench(&self) -> bool {
        self.i1 > 1.0 || (-2.0 < self.i1 && self.s1 < 1.0)
    }
}

/// Outcome of an envelope check; margins are signed, negative means violated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub check: Check,
    pub pass: bool,
    pub worst_margin: f64,
    pub worst_time: f64,
    pub worst_index: usize,
    pub slack: f64,
    pub snapshots_checked: usize,
    pub detail: String,
}

/// Affine bound a·t + b, used from below or above.
#[derive(Debug, Clone, Copy)]
struct Affine {
    slope: f64,
    offset: f64,
}

impl Affine {
    fn at(self, t: f64) -> f64 {
        self.slope * t + self.offset
    }
}

fn constant(c: f64) -> Affine {
    Affine {
        slope: 0.0,
        offset: c,
    }
}

/// Bounds lo₁ ≤ u₁ ≤ hi₁, lo₂ ≤ u₂ ≤ hi₂.
#[derive(Debug, Clone, Copy)]
struct Box4 {
    lo1: Option<Affine>,
    hi1: Option<Affine>,
    lo2: Option<Affine>,
    hi2: Option<Affine>,
}

#[derive(Debug, Clone, Copy)]
struct Worst {
    margin: f64,
    time: f64,
    index: usize,
}

impl Worst {
    fn new() -> Self {
        Worst {
            margin: f64::INFINITY,
            time: 0.0,
            index: 0,
        }
    }

    fn update(&mut self, margin: f64, time: f64, index: usize) {
        if margin < self.margin {
            *self = Worst {
                margin,
                time,
                index,
            };
        }
    }
}

fn box_margin(field: &GridField, b: &Box4, worst: &mut Worst) {
    let t = field.time;
    for (i, v) in field.values().iter().enumerate() {
        let ms = [
            b.lo1.map(|a| v.re - a.at(t)),
            b.hi1.map(|a| a.at(t) - v.re),
            b.lo2.map(|a| v.im - a.at(t)),
            b.hi2.map(|a| a.at(t) - v.im),
        ];
        for m in ms.into_iter().flatten() {
            worst.update(m, t, i);
        }
    }
}

fn snapshot_fields(run: &RunRecord) -> Result<Vec<&GridField>> {
    let fields: Vec<&GridField> = run
        .snapshots
        .iter()
        .filter_map(|s| s.field.as_ref())
        .collect();
    if fields.is_empty() {
        return Err(ZetaError::Config("run kept no snapshot fields".into()));
    }
    Ok(fields)
}

/// Checks `run` against `check` at every stored snapshot and grid point,
/// allowing slack 1e-6 + 10·`discretization_error`.
pub fn envelope_check(
    run: &RunRecord,
    params: &EnvelopeParams,
    check: Check,
    discretization_error: f64,
) -> Result<EnvelopeReport> {
    params.check_hypotheses(check)?;
    let slack = 1e-6 + 10.0 * discretization_error;
    let mut worst = Worst::new();
    let mut checked = 0;
    let detail;
    match check {
        Check::PrincipalStrip | Check::RealCharacterStrip | Check::RealAbovePole => {
            let z = params.zeta_i1.expect("I1 > 1 checked with the hypotheses");
            let b = match check {
                Check::PrincipalStrip => Box4 {
                    lo1: Some(Affine {
                        slope: (2.0 - z).max(0.0),
                        offset: params.i1,
                    }),
                    hi1: Some(Affine {
                        slope: z,
                        offset: params.s1,
                    }),
                    lo2: Some(Affine {
                        slope: 1.0 - z,
                        offset: params.i2,
                    }),
                    hi2: Some(Affine {
                        slope: z - 1.0,
                        offset: params.s2,
                    }),
                },
                Check::RealCharacterStrip => Box4 {
                    lo1: Some(Affine {
                        slope: (2.0 - z).max(0.0),
                        offset: params.i1,
                    }),
                    hi1: Some(Affine {
                        slope: z,
                        offset: params.s1,
                    }),
                    lo2: Some(constant(0.0)),
                    hi2: Some(Affine {
                        slope: z - 1.0,
                        offset: params.s2,
                    }),
                },
                _ => Box4 {
                    lo1: Some(Affine {
                        slope: 1.0,
                        offset: params.i1,
                    }),
                    hi1: Some(Affine {
                        slope: z,
                        offset: params.s1,
                    }),
                    lo2: Some(constant(0.0)),
                    hi2: Some(constant(0.0)),
                },
            };
            for f in snapshot_fields(run)? {
                box_margin(f, &b, &mut worst);
                checked += 1;
            }
            detail = format!("zeta(I1) = {z}");
        }
        Check::RealBetweenZeros => {
            let b = Box4 {
                lo1: Some(constant(params.lower_zero)),
                hi1: Some(constant(params.upper_zero)),
                lo2: Some(constant(0.0)),
                hi2: Some(constant(0.0)),
            };
            for f in snapshot_fields(run)? {
                box_margin(f, &b, &mut worst);
                checked += 1;
            }
            detail = format!("confined to [{}, {}]", params.lower_zero, params.upper_zero);
        }
        Check::RealLimitCells => {
            let lo = -4.0 * params.n1.expect("checked") as f64 + 2.0;
            let hi = -4.0 * params.n2.expect("checked") as f64 + 2.0;
            let b = Box4 {
                lo1: Some(constant(lo)),
                hi1: Some(constant(hi)),
                lo2: Some(constant(0.0)),
                hi2: Some(constant(0.0)),
            };
            box_margin(&run.final_field, &b, &mut worst);
            checked = 1;
            detail = format!(
                "final field within [{lo}, {hi}] at t = {}",
                run.final_time()
            );
        }
        Check::SinkAttraction => {
            let (z0, delta) = params.sink.expect("checked");
            let fields = snapshot_fields(run)?;
            let d0 = fields[0].sup_distance_to(z0);
            if !(d0 < delta) {
                return Err(ZetaError::Config(format!(
                    "hypothesis not met: datum within distance {delta} of the sink (sup distance {d0})"
                )));
            }
            for f in &fields {
                let d = f.sup_distance_to(z0);
                worst.update(2.0 * delta - d, f.time, 0);
                checked += 1;
            }
            let d_end = run.final_field.sup_distance_to(z0);
            worst.update(d0 - d_end, run.final_time(), 0);
            detail = format!("sup |u - z0|: {d0:e} -> {d_end:e}");
        }
        Check::Quenching => {
            let quenched = matches!(
                run.termination,
                PdeTermination::Quenched { .. } | PdeTermination::Escaped { .. }
            );
            let expected = params.predicts_quench();
            let end = run.final_time();
            worst.update(if quenched == expected { 0.0 } else { -1.0 }, end, 0);
            checked = run.snapshots.len();
            detail = format!(
                "expected {}, termination {:?}",
                if expected {
                    "quench"
                } else {
                    "global solution"
                },
                run.termination
            );
        }
    }
    Ok(EnvelopeReport {
        check,
        pass: worst.margin >= -slack,
        worst_margin: worst.margin,
        worst_time: worst.time,
        worst_index: worst.index,
        slack,
        snapshots_checked: checked,
        detail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::{principal_character, LFunctionHandle};
    use crate::flow_pde::etd::{integrate_pde, PdeConfig};
    use crate::special::EvalConfig;
    use std::f64::consts::PI;

    fn zeta_flow(lambda: f64, t_end: f64) -> FlowConfig {
        FlowConfig::new(
            LFunctionHandle::zeta(EvalConfig::default()).unwrap(),
            lambda,
            t_end,
        )
    }

    fn constant_field(re: f64, im: f64) -> GridField {
        GridField::constant(vec![16], 2.0 * PI, Complex64::new(re, im)).unwrap()
    }

    #[test]
    fn ids_round_trip() {
        for c in Check::ALL {
            assert_eq!(c.id().parse::<Check>().unwrap(), c);
        }
        assert!("thm9".parse::<Check>().is_err());
    }

    #[test]
    fn derived_parameters() {
        let g = GridField::from_fn(vec![16], 2.0 * PI, |x| {
            Complex64::new(-5.0 + 2.5 * x[0].cos(), 0.0)
        })
        .unwrap();
        let params = EnvelopeParams::from_field(&g, &zeta_flow(1.0, 1.0)).unwrap();
        assert_eq!(params.i1, -7.5);
        assert_eq!(params.lower_zero, -8.0);
        assert_eq!(params.upper_zero, -2.0);
        assert_eq!(params.n1, Some(2));
        assert_eq!(params.n2, Some(1));
        assert!(params.real);
        assert!((params.sigma1 - 1.7286472394).abs() < 1e-7);
        let params =
            EnvelopeParams::from_field(&constant_field(-1.0, 0.0), &zeta_flow(1.0, 1.0)).unwrap();
        assert_eq!(params.lower_zero, -2.0);
        assert_eq!(params.upper_zero, -1.0);
        assert_eq!(params.n1, Some(1));
        let params =
            EnvelopeParams::from_field(&constant_field(-4.0, 0.0), &zeta_flow(1.0, 1.0)).unwrap();
        assert_eq!(params.upper_zero, -4.0);
        assert_eq!(params.n1, None);
    }

    #[test]
    fn principal_strip_slopes() {
        let g = constant_field(2.0, 0.5);
        let flow = zeta_flow(1.0, 1.0);
        let params = EnvelopeParams::from_field(&g, &flow).unwrap();
        let z = params.zeta_i1.unwrap();
        assert!((z - PI * PI / 6.0).abs() < 1e-10);
        assert!(((2.0 - z) - 0.3551).abs() < 1e-4);
        let run = integrate_pde(&g, &PdeConfig::new(flow, 1e-2)).unwrap();
        let rep = envelope_check(&run, &params, Check::PrincipalStrip, 0.0).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.worst_margin > -1e-12);
    }

    #[test]
    fn hypotheses_are_enforced() {
        let flow = zeta_flow(1.0, 1.0);
        let params = EnvelopeParams::from_field(&constant_field(1.5, 0.0), &flow).unwrap();
        assert!(matches!(
            params.check_hypotheses(Check::PrincipalStrip),
            Err(ZetaError::Config(_))
        ));
        assert!(params.check_hypotheses(Check::RealAbovePole).is_ok());
        assert!(params.check_hypotheses(Check::RealBetweenZeros).is_err());
        assert!(params.check_hypotheses(Check::Quenching).is_err());
        assert!(params.check_hypotheses(Check::SinkAttraction).is_err());
        let params = EnvelopeParams::from_field(&constant_field(3.0, 0.1), &flow).unwrap();
        assert!(params.check_hypotheses(Check::RealAbovePole).is_err());
        assert!(params.check_hypotheses(Check::RealCharacterStrip).is_ok());
        let l2 = LFunctionHandle::new(principal_character(2), EvalConfig::default()).unwrap();
        let f2 = FlowConfig::new(l2, 1.0, 1.0);
        let params = EnvelopeParams::from_field(&constant_field(3.0, 0.0), &f2).unwrap();
        assert!(params.check_hypotheses(Check::PrincipalStrip).is_ok());
        assert!(params.check_hypotheses(Check::RealAbovePole).is_err());
    }

    #[test]
    fn violated_bound_fails() {
        let flow = zeta_flow(1.0, 1.0);
        let g = constant_field(2.0, 0.0);
        let run = integrate_pde(&g, &PdeConfig::new(flow.clone(), 1e-2)).unwrap();
        let mut params = EnvelopeParams::from_field(&g, &flow).unwrap();
        assert!(
            envelope_check(&run, &params, Check::RealAbovePole, 0.0)
                .unwrap()
                .pass
        );
        params.zeta_i1 = Some(1.2);
        let rep = envelope_check(&run, &params, Check::RealAbovePole, 0.0).unwrap();
        assert!(!rep.pass);
        assert!(rep.worst_margin < -0.1);
        assert!(rep.worst_time > 0.5);
    }

    #[test]
    fn quench_prediction() {
        let flow = zeta_flow(-1.0, 3.0);
        for (c, quench) in [(0.5, true), (2.0, true), (-3.0, false)] {
            let g = constant_field(c, 0.0);
            let params = EnvelopeParams::from_field(&g, &flow).unwrap();
            assert_eq!(params.predicts_quench(), quench);
            let run = integrate_pde(&g, &PdeConfig::new(flow.clone(), 1e-2)).unwrap();
            assert!(
                envelope_check(&run, &params, Check::Quenching, 0.0)
                    .unwrap()
                    .pass,
                "{c}"
            );
        }
    }
}
