//! The `flow` command: scalar, grid and Picard runs with their artifacts.

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;
use zetaflow::flow_ode::{classify_zero, integrate_flow, pole_distance, FlowConfig};
use zetaflow::flow_pde::{
    constants_for, envelope_check, integrate_pde, picard_local_solve, self_convergence_estimate,
    Check, EnvelopeParams, EnvelopeReport, GridField, InitialDatum, PdeConfig, RunRecord, StopNear,
};
use zetaflow::output::fmt_f64;
use zetaflow::ZetaError;

use crate::config::{ExperimentConfig, Mode};

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct MonitorExtrema {
    pub min_p: f64,
    pub max_sup_abs: f64,
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl MonitorExtrema {
    fn of(points: impl IntoIterator<Item = (f64, f64, f64, f64, f64, f64)>) -> Self {
        points.into_iter().fold(
            MonitorExtrema {
                min_p: f64::INFINITY,
                max_sup_abs: 0.0,
                re_min: f64::INFINITY,
                re_max: f64::NEG_INFINITY,
                im_min: f64::INFINITY,
                im_max: f64::NEG_INFINITY,
            },
            |m, (p, a, r0, r1, i0, i1)| MonitorExtrema {
                min_p: m.min_p.min(p),
                max_sup_abs: m.max_sup_abs.max(a),
                re_min: m.re_min.min(r0),
                re_max: m.re_max.max(r1),
                im_min: m.im_min.min(i0),
                im_max: m.im_max.max(i1),
            },
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PicardSummary {
    pub t_local: f64,
    pub beta: f64,
    pub eps: f64,
    pub iterations: usize,
    pub max_ratio: f64,
    pub ratios: Vec<f64>,
    pub differences: Vec<f64>,
    pub etd_difference: f64,
}

/// Deterministic record of one run; wall time is reported separately.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub mode: Mode,
    pub termination: serde_json::Value,
    pub t_final: f64,
    pub monitors: MonitorExtrema,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope: Option<EnvelopeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub picard: Option<PicardSummary>,
    pub artifacts: Vec<String>,
    pub config_hash: String,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub struct FlowOutcome {
    pub summary: RunSummary,
    pub wall_time: f64,
    pub failure: Option<ZetaError>,
}

fn datum_seed(d: &InitialDatum) -> Option<u64> {
    match d {
        InitialDatum::DiscRandom { seed, .. } | InitialDatum::IntervalRandom { seed, .. } => {
            Some(*seed)
        }
        _ => None,
    }
}

fn write(dir: &Path, name: &str, text: &str, artifacts: &mut Vec<String>) -> Result<()> {
    let path = dir.join(name);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    artifacts.push(path.display().to_string());
    Ok(())
}

fn monitor_csv(run: &RunRecord) -> String {
    let mut out = String::from("t,dt,min_p,re_min,re_max,im_min,im_max,sup_abs\n");
    for m in &run.steps {
        let cols = [
            m.t, m.dt, m.min_p, m.re_min, m.re_max, m.im_min, m.im_max, m.sup_abs,
        ];
        out.push_str(
            &cols
                .iter()
                .map(|v| fmt_f64(*v))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
    }
    out
}

fn build_field(cfg: &ExperimentConfig) -> Result<(InitialDatum, GridField)> {
    let datum = cfg
        .datum
        .clone()
        .ok_or_else(|| anyhow!("flow needs a datum"))?;
    if !(1..=2).contains(&cfg.grid.dims) {
        bail!("grid dims must be 1 or 2");
    }
    let shape = vec![cfg.grid.n; cfg.grid.dims];
    let g = datum.build(shape, cfg.grid.length)?;
    Ok((datum, g))
}

fn flow_config(cfg: &ExperimentConfig) -> Result<FlowConfig> {
    let l = cfg.nonlinearity.handle(cfg.eval)?;
    let mut f = FlowConfig::new(l, cfg.lambda, cfg.solver.t_end);
    f.pole_guard_eps = cfg.solver.pole_guard_eps;
    f.rtol = cfg.solver.rtol;
    f.atol = cfg.solver.atol;
    f.validate()?;
    Ok(f)
}

/// Parses the check and verifies its hypotheses on the datum, before any
/// time stepping.
fn prepare_check(
    cfg: &ExperimentConfig,
    datum: &InitialDatum,
    g: &GridField,
    flow: &FlowConfig,
) -> Result<Option<(Check, EnvelopeParams)>> {
    let Some(id) = &cfg.check else {
        return Ok(None);
    };
    let check: Check = id.parse()?;
    if cfg.mode != Mode::Pde {
        bail!("checks apply to grid runs (--mode pde)");
    }
    let mut params = EnvelopeParams::from_field(g, flow)?;
    if check == Check::SinkAttraction {
        let InitialDatum::DiscRandom { center, radius, .. } = datum else {
            bail!("the sink check needs a disc datum");
        };
        let z = classify_zero(
            Complex64::new(center[0], center[1]),
            flow.nonlinearity.eval_cfg(),
        )?;
        if !z.kind.is_sink() {
            return Err(ZetaError::Config(format!("zero at {} is not a sink", z.location)).into());
        }
        params = params.with_sink(z.location, *radius);
    }
    params.check_hypotheses(check)?;
    Ok(Some((check, params)))
}

pub fn run_flow(cfg: &ExperimentConfig) -> Result<FlowOutcome> {
    cfg.validate()?;
    let (datum, g) = build_field(cfg)?;
    let flow = flow_config(cfg)?;
    let check = prepare_check(cfg, &datum, &g, &flow)?;
    if flow.nonlinearity.has_pole() && !(g.min_pole_distance().1 > 0.0) {
        return Err(ZetaError::Config("datum touches the pole".into()).into());
    }
    let dir: PathBuf = cfg.output.dir.clone();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let start = Instant::now();
    let mut summary = RunSummary {
        mode: cfg.mode,
        termination: serde_json::Value::Null,
        t_final: 0.0,
        monitors: MonitorExtrema::default(),
        envelope: None,
        picard: None,
        artifacts: Vec::new(),
        config_hash: cfg.hash(),
        seed: datum_seed(&datum).or(cfg.seed),
        error: None,
    };
    let result = match cfg.mode {
        Mode::Ode => run_ode(&g, &flow, &dir, &mut summary),
        Mode::Pde => run_pde(cfg, &g, &flow, check, &dir, &mut summary),
        Mode::Picard => run_picard(cfg, &g, &flow, &dir, &mut summary),
    };
    let failure = match result {
        Ok(()) => None,
        Err(e) => {
            let z = e.downcast_ref::<ZetaError>().cloned();
            summary.error = Some(format!("{e:#}"));
            summary.termination = serde_json::json!({"reason": "failed"});
            match z {
                Some(z) => Some(z),
                None => return Err(e),
            }
        }
    };
    let mut artifacts = summary.artifacts.clone();
    artifacts.push(dir.join("summary.json").display().to_string());
    summary.artifacts = artifacts;
    fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    Ok(FlowOutcome {
        summary,
        wall_time: start.elapsed().as_secs_f64(),
        failure,
    })
}

fn run_ode(g: &GridField, flow: &FlowConfig, dir: &Path, summary: &mut RunSummary) -> Result<()> {
    let s0 = g.values()[0];
    if g.values().iter().any(|v| *v != s0) {
        bail!("scalar mode needs a constant datum");
    }
    let traj = integrate_flow(flow, s0)?;
    summary.termination = serde_json::to_value(traj.termination)?;
    summary.t_final = traj.last().0;
    summary.monitors = MonitorExtrema::of(
        traj.points
            .iter()
            .map(|(_, z)| (pole_distance(*z), z.norm(), z.re, z.re, z.im, z.im)),
    );
    write(
        dir,
        "trajectory.csv",
        &traj.to_csv(),
        &mut summary.artifacts,
    )
}

fn run_pde(
    cfg: &ExperimentConfig,
    g: &GridField,
    flow: &FlowConfig,
    check: Option<(Check, EnvelopeParams)>,
    dir: &Path,
    summary: &mut RunSummary,
) -> Result<()> {
    let mut pde = PdeConfig::new(flow.clone(), cfg.solver.dt);
    pde.snapshot_every = cfg.solver.snapshot_every;
    if let Some(tol) = cfg.solver.stop_tol {
        let target = match cfg.datum.as_ref() {
            Some(InitialDatum::DiscRandom { center, .. }) => Complex64::new(center[0], center[1]),
            Some(InitialDatum::Constant { value }) => Complex64::new(value[0], value[1]),
            _ => bail!("stop_tol needs a constant or disc datum"),
        };
        pde.stop_near = Some(StopNear { target, tol });
    }
    let run = integrate_pde(g, &pde)?;
    summary.termination = serde_json::to_value(run.termination)?;
    summary.t_final = run.final_time();
    summary.monitors = MonitorExtrema::of(
        run.steps
            .iter()
            .map(|m| (m.min_p, m.sup_abs, m.re_min, m.re_max, m.im_min, m.im_max)),
    );
    write(
        dir,
        "trajectory.csv",
        &monitor_csv(&run),
        &mut summary.artifacts,
    )?;
    write(
        dir,
        "run.json",
        &run.metadata_json()?,
        &mut summary.artifacts,
    )?;
    if cfg.output.fields {
        for (i, s) in run.snapshots.iter().enumerate() {
            if let Some(f) = &s.field {
                write(
                    dir,
                    &format!("fields/snapshot_{i:05}.csv"),
                    &f.to_csv(),
                    &mut summary.artifacts,
                )?;
            }
        }
    }
    if let Some((check, params)) = check {
        let err = if check == Check::Quenching {
            0.0
        } else {
            self_convergence_estimate(g, &pde)?
        };
        summary.envelope = Some(envelope_check(&run, &params, check, err)?);
    }
    Ok(())
}

fn run_picard(
    cfg: &ExperimentConfig,
    g: &GridField,
    flow: &FlowConfig,
    dir: &Path,
    summary: &mut RunSummary,
) -> Result<()> {
    let m = flow.nonlinearity.period() as u32;
    let consts = constants_for(g, m)?;
    let res = picard_local_solve(g, &consts, cfg.solver.picard_iterations, flow)?;
    let mut etd_flow = flow.clone();
    etd_flow.t_end = consts.t_local;
    let mut pde = PdeConfig::new(etd_flow, consts.t_local / 16.0);
    pde.dt_min = pde.dt_min.min(pde.dt);
    pde.keep_fields = false;
    let run = integrate_pde(g, &pde)?;
    let etd_difference = run.final_field.sup_difference(&res.field);
    summary.termination = serde_json::json!({"reason": "completed"});
    summary.t_final = consts.t_local;
    let (r0, r1, i0, i1) = res.field.extrema();
    summary.monitors = MonitorExtrema {
        min_p: res.field.min_pole_distance().1,
        max_sup_abs: res.field.sup_abs(),
        re_min: r0,
        re_max: r1,
        im_min: i0,
        im_max: i1,
    };
    summary.picard = Some(PicardSummary {
        t_local: consts.t_local,
        beta: consts.beta,
        eps: consts.eps,
        iterations: res.iterations,
        max_ratio: res.max_ratio(),
        ratios: res.ratios.clone(),
        differences: res.differences.clone(),
        etd_difference,
    });
    write(
        dir,
        "constants.json",
        &serde_json::to_string_pretty(&consts)?,
        &mut summary.artifacts,
    )?;
    write(
        dir,
        "picard_field.csv",
        &res.field.to_csv(),
        &mut summary.artifacts,
    )
}
