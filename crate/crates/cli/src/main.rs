//! `zflow`: evaluation, zero scans, flows, constants and abscissae from the
//! command line.

mod config;
mod flow;
mod parse;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;
use zetaflow::dirichlet::{
    l_eval_deriv, l_eval_detailed, re_bounds_check, sigma0_estimate, sigma1_root, Sigma0Grid,
};
use zetaflow::flow_ode::{find_critical_zeros, sink_proportion, sink_proportion_csv};
use zetaflow::flow_pde::local_constants;
use zetaflow::output::fmt_f64;
use zetaflow::special::{
    bound_constants, d1_numerical, e_r, hurwitz_zeta_deriv, hurwitz_zeta_detailed, EvalConfig,
};
use zetaflow::ZetaError;

use config::{ExperimentConfig, Mode, Nonlinearity};

#[derive(Parser)]
#[command(name = "zflow", version, about = "Zeta and Dirichlet L-function flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate ζ, a Hurwitz zeta or an L-function at s.
    Eval(EvalArgs),
    /// Evaluate a Dirichlet L-function, optionally checking its real-part bounds.
    L(LArgs),
    /// Locate and classify zeros on the critical line.
    Zeros(ZerosArgs),
    /// Integrate the scalar or grid flow from a datum.
    Flow(Box<FlowArgs>),
    /// Print the majorant constants and the local existence time.
    Bounds(BoundsArgs),
    /// Estimate σ₁ or the window-limited σ₀.
    Sigma(SigmaArgs),
}

#[derive(Args, Clone, Default)]
struct NonlinearityArgs {
    /// Principal character mod M.
    #[arg(long, value_name = "M")]
    principal: Option<usize>,
    /// Characters mod the prime P (with --index).
    #[arg(long, value_name = "P")]
    prime: Option<usize>,
    #[arg(long, default_value_t = 0)]
    index: usize,
    /// Character table JSON file.
    #[arg(long, value_name = "FILE")]
    character: Option<PathBuf>,
}

impl NonlinearityArgs {
    fn params(&self) -> Result<Option<Nonlinearity>> {
        let given = [
            self.principal.is_some(),
            self.prime.is_some(),
            self.character.is_some(),
        ];
        if given.iter().filter(|b| **b).count() > 1 {
            bail!("give at most one of --principal, --prime, --character");
        }
        Ok(if let Some(m) = self.principal {
            Some(Nonlinearity::Principal { m })
        } else if let Some(p) = self.prime {
            Some(Nonlinearity::Prime {
                p,
                index: self.index,
            })
        } else {
            self.character
                .clone()
                .map(|path| Nonlinearity::Character { path })
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalTarget {
    Zeta,
    Hurwitz,
    L,
}

#[derive(Args)]
struct EvalArgs {
    target: EvalTarget,
    #[arg(long, allow_hyphen_values = true)]
    s: String,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Evaluate the s-derivative instead.
    #[arg(long)]
    deriv: bool,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    nl: NonlinearityArgs,
}

#[derive(Args)]
struct LArgs {
    #[arg(long, allow_hyphen_values = true)]
    s: String,
    #[arg(long)]
    deriv: bool,
    /// Also report the real-part bounds that hold right of σ₁.
    #[arg(long)]
    bounds: bool,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    nl: NonlinearityArgs,
}

#[derive(Args)]
struct ZerosArgs {
    #[arg(long, default_value_t = 100.0)]
    tmax: f64,
    #[arg(long, default_value = "zflow_out")]
    out_dir: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct FlowArgs {
    /// JSON experiment document; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// const:Z, disc:Z:R[:SEED] or interval:LO:HI[:SEED].
    #[arg(long, allow_hyphen_values = true)]
    datum: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long)]
    tend: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Grid points per axis.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long)]
    length: Option<f64>,
    /// One of thm1.5, cor1.6, thm1.7i, thm1.7ii, thm1.7iii, thm1.8, thm1.9.
    #[arg(long)]
    check: Option<String>,
    /// Seed for random data whose string carries none (default 0).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Write every stored snapshot as CSV.
    #[arg(long)]
    fields: bool,
    #[arg(long)]
    snapshot_every: Option<usize>,
    #[arg(long)]
    stop_tol: Option<f64>,
    #[arg(long)]
    picard_iterations: Option<usize>,
    #[command(flatten)]
    nl: NonlinearityArgs,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    /// Period m; the constants use α = 1/m.
    #[arg(long)]
    m: Option<u32>,
    /// Pole-distance floor; switches on the local existence constants.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Sigma0,
    Sigma1,
}

#[derive(Args)]
struct SigmaArgs {
    #[arg(long, value_enum, default_value = "sigma1")]
    which: Which,
    #[arg(long, default_value_t = 500.0)]
    tmax: f64,
    #[arg(long, default_value_t = 1.0)]
    lo: f64,
    #[arg(long, default_value_t = 1.3)]
    hi: f64,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    nl: NonlinearityArgs,
}

fn load_config(path: &Option<PathBuf>) -> Result<ExperimentConfig> {
    let cfg = match path {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn complex_json(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn fmt_complex(z: Complex64) -> String {
    format!(
        "{} {} i",
        fmt_f64(z.re),
        if z.im < 0.0 {
            format!("- {}", fmt_f64(-z.im))
        } else {
            format!("+ {}", fmt_f64(z.im))
        }
    )
}

fn print_value(
    json: bool,
    s: Complex64,
    value: Complex64,
    error: Option<f64>,
    path: Option<String>,
) {
    if json {
        println!(
            "{}",
            json!({"s": complex_json(s), "value": complex_json(value), "error": error, "path": path})
        );
    } else {
        println!("value = {}", fmt_complex(value));
        if let Some(e) = error {
            println!("error = {e:.3e}");
        }
        println!("path  = {}", path.as_deref().unwrap_or("-"));
    }
}

fn eval_l(
    params: &Nonlinearity,
    eval: EvalConfig,
    s: Complex64,
    deriv: bool,
    json: bool,
) -> Result<()> {
    let l = params.handle(eval)?;
    if deriv {
        print_value(json, s, l_eval_deriv(&l, s)?, None, None);
    } else {
        let v = l_eval_detailed(&l, s)?;
        print_value(
            json,
            s,
            v.value,
            Some(v.error),
            v.path.map(|p| p.to_string()),
        );
    }
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let cfg = load_config(&a.config)?;
    let s = parse::complex(&a.s)?;
    let alpha = match a.target {
        EvalTarget::Zeta => 1.0,
        EvalTarget::Hurwitz => a.alpha,
        EvalTarget::L => {
            let params = a.nl.params()?.unwrap_or(cfg.nonlinearity);
            return eval_l(&params, cfg.eval, s, a.deriv, a.json);
        }
    };
    if a.deriv {
        print_value(
            a.json,
            s,
            hurwitz_zeta_deriv(s, alpha, &cfg.eval)?,
            None,
            None,
        );
    } else {
        let v = hurwitz_zeta_detailed(s, alpha, &cfg.eval)?;
        print_value(a.json, s, v.value, Some(v.error), Some(v.path.to_string()));
    }
    Ok(())
}

fn cmd_l(a: LArgs) -> Result<()> {
    let cfg = load_config(&a.config)?;
    let s = parse::complex(&a.s)?;
    let params = a.nl.params()?.unwrap_or(cfg.nonlinearity);
    eval_l(&params, cfg.eval, s, a.deriv, a.json)?;
    if a.bounds {
        let rep = re_bounds_check(&params.handle(cfg.eval)?, s)?;
        if a.json {
            println!("{}", serde_json::to_string(&rep)?);
        } else {
            println!(
                "bounds: {} <= Re L <= {}, |Im L| <= {}; hold = {}",
                fmt_f64(rep.re_lower),
                fmt_f64(rep.re_upper),
                fmt_f64(rep.im_bound),
                rep.all_hold()
            );
        }
    }
    Ok(())
}

fn cmd_zeros(a: ZerosArgs) -> Result<()> {
    let cfg = load_config(&a.config)?;
    let scan = find_critical_zeros(a.tmax, &cfg.eval)?;
    std::fs::create_dir_all(&a.out_dir)
        .with_context(|| format!("creating {}", a.out_dir.display()))?;
    let zpath = a.out_dir.join("zeros.json");
    let ppath = a.out_dir.join("p_n.csv");
    std::fs::write(&zpath, serde_json::to_string_pretty(&scan)?)?;
    std::fs::write(&ppath, sink_proportion_csv(&sink_proportion(&scan.zeros)))?;
    let sinks = scan.zeros.iter().filter(|z| z.kind.is_sink()).count();
    println!(
        "{} zeros with 0 < t <= {}: {} sinks, {} sources; {} seeds skipped",
        scan.zeros.len(),
        a.tmax,
        sinks,
        scan.zeros.len() - sinks,
        scan.skipped.len()
    );
    for z in &scan.zeros {
        println!(
            "  t = {:.10}  Re zeta' = {:+.6e}  {:?}",
            z.location.im, z.deriv_re, z.kind
        );
    }
    println!("wrote {} and {}", zpath.display(), ppath.display());
    Ok(())
}

fn flow_config(a: &FlowArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(m) = a.mode {
        cfg.mode = m;
    }
    if let Some(s) = a.seed {
        cfg.seed = Some(s);
    }
    if let Some(d) = &a.datum {
        cfg.datum = Some(parse::datum(d, Some(cfg.seed.unwrap_or(0)))?);
    }
    if let Some(l) = a.lambda {
        cfg.lambda = l;
    }
    if let Some(t) = a.tend {
        cfg.solver.t_end = t;
    }
    if let Some(dt) = a.dt {
        cfg.solver.dt = dt;
    }
    if let Some(n) = a.n {
        cfg.grid.n = n;
    }
    if let Some(d) = a.dims {
        cfg.grid.dims = d;
    }
    if let Some(l) = a.length {
        cfg.grid.length = l;
    }
    if let Some(c) = &a.check {
        cfg.check = Some(c.clone());
    }
    if let Some(o) = &a.out_dir {
        cfg.output.dir = o.clone();
    }
    if a.fields {
        cfg.output.fields = true;
    }
    if a.snapshot_every.is_some() {
        cfg.solver.snapshot_every = a.snapshot_every;
    }
    if a.stop_tol.is_some() {
        cfg.solver.stop_tol = a.stop_tol;
    }
    if let Some(k) = a.picard_iterations {
        cfg.solver.picard_iterations = k;
    }
    if let Some(params) = a.nl.params()? {
        cfg.nonlinearity = params;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_flow(a: &FlowArgs) -> Result<()> {
    let cfg = flow_config(a)?;
    let out = flow::run_flow(&cfg)?;
    let s = &out.summary;
    println!("termination: {}", s.termination);
    println!("t_final: {}", fmt_f64(s.t_final));
    println!("wall_time_s: {:.3}", out.wall_time);
    println!(
        "monitors: min P = {}, sup |u| = {}, u1 in [{}, {}], u2 in [{}, {}]",
        fmt_f64(s.monitors.min_p),
        fmt_f64(s.monitors.max_sup_abs),
        fmt_f64(s.monitors.re_min),
        fmt_f64(s.monitors.re_max),
        fmt_f64(s.monitors.im_min),
        fmt_f64(s.monitors.im_max)
    );
    if let Some(e) = &s.envelope {
        println!(
            "check {}: {} (worst margin {:.3e} at t = {}, slack {:.3e}; {})",
            e.check,
            if e.pass { "pass" } else { "FAIL" },
            e.worst_margin,
            e.worst_time,
            e.slack,
            e.detail
        );
    }
    if let Some(p) = &s.picard {
        println!(
            "picard: t_local = {:.6e}, {} iterations, max ratio {:.3e}, |picard - etd| = {:.3e}",
            p.t_local, p.iterations, p.max_ratio, p.etd_difference
        );
    }
    println!("config hash: {}", s.config_hash);
    for path in &s.artifacts {
        println!("wrote {path}");
    }
    if let Some(f) = out.failure {
        return Err(f.into());
    }
    Ok(())
}

fn row(name: &str, value: Option<f64>, provenance: &str) {
    let v = value.map_or_else(|| "undefined".to_string(), fmt_f64);
    println!("{name:<6} {v:<26} {provenance}");
}

fn cmd_bounds(a: BoundsArgs) -> Result<()> {
    if let Some(eps) = a.eps {
        let m = a.m.unwrap_or(1);
        if a.alpha.is_some() {
            bail!("--alpha is implied by --m when --eps is given");
        }
        let c = local_constants(a.beta, eps, m)?;
        if a.json {
            println!("{}", serde_json::to_string_pretty(&c)?);
            return Ok(());
        }
        println!(
            "m = {m}, alpha = {}, beta = {}, eps = {eps}",
            c.alpha, c.beta
        );
        print_bound_rows(&c.bounds, c.d1);
        row("Z1", Some(c.z1), "1/eps + H1 + D1");
        row("Z2", Some(c.z2), "1/eps^2 + sqrt2 (H2 + D2)");
        row("M1", Some(c.m1), "m^(beta+1) Z1");
        row("M2", Some(c.m2), "(m^(beta+1) + m^(beta+2)) Z2");
        row(
            "T",
            Some(c.t_local),
            "min{1/(2 M2), beta/(2 M1), eps/(4 M1)}",
        );
        return Ok(());
    }
    let alpha = match (a.alpha, a.m) {
        (Some(_), Some(_)) => bail!("give --alpha or --m, not both"),
        (Some(x), None) => x,
        (None, Some(m)) if m > 0 => 1.0 / m as f64,
        (None, Some(_)) => bail!("--m must be at least 1"),
        (None, None) => 1.0,
    };
    let b = bound_constants(alpha, a.beta)?;
    let d1 = d1_numerical(alpha, a.beta)?;
    if a.json {
        println!("{}", json!({"bounds": b, "d1": d1}));
        return Ok(());
    }
    println!("alpha = {alpha}, beta = {}", a.beta);
    print_bound_rows(&b, d1);
    for r in [0.5, 1.0, 2.0] {
        row(
            &format!("E_{r}"),
            Some(e_r(r)?),
            "closed form e^r(2r^2+6r+4)/r^2",
        );
    }
    Ok(())
}

fn print_bound_rows(b: &zetaflow::special::BoundConstants, d1: f64) {
    println!("{:<6} {:<26} provenance", "name", "value");
    row("a", Some(b.a_ab), "closed form");
    row("b", Some(b.b_b), "closed form");
    row("H1", Some(b.h1), "closed form 2(a + b)");
    row("I1", Some(b.i1_ab), "closed form");
    row("I2", Some(b.i2_ab), "closed form");
    row("H2", Some(b.h2), "closed form I1 + I2");
    row("D1", Some(d1), "numerical sup x 1.1 (101x101 grid)");
    row("D2", Some(b.d2), "closed form");
    row("E_r", b.e_r, "closed form at r = ln(1/alpha)(beta+1)");
}

fn cmd_sigma(a: SigmaArgs) -> Result<()> {
    let cfg = load_config(&a.config)?;
    match a.which {
        Which::Sigma1 => {
            let s1 = sigma1_root(&cfg.eval)?;
            if a.json {
                println!("{}", json!({"sigma1": s1}));
            } else {
                println!("sigma1 = {s1:.10}  (root of zeta(sigma) = 2)");
            }
        }
        Which::Sigma0 => {
            let params = a.nl.params()?.unwrap_or(cfg.nonlinearity);
            let l = params.handle(cfg.eval)?;
            let est = sigma0_estimate(&l, a.lo, a.hi, a.tmax, &Sigma0Grid::default())?;
            if a.json {
                println!(
                    "{}",
                    json!({"estimate": est, "sigma_lo": a.lo, "sigma_hi": a.hi})
                );
            } else {
                println!("sigma0 ~ {:.4}", est.sigma0);
                println!(
                    "window: sigma in [{}, {}], |t| <= {}; sign change {}",
                    a.lo,
                    a.hi,
                    est.t_max,
                    if est.attained {
                        "found"
                    } else {
                        "not attained in window"
                    }
                );
                if let Some(t) = est.witness_t {
                    println!("witness t = {t:.4}");
                }
            }
        }
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<ZetaError>() {
        Some(
            ZetaError::Config(_)
            | ZetaError::Validation(_)
            | ZetaError::Domain(_)
            | ZetaError::Pole
            | ZetaError::Io(_),
        )
        | None => 2,
        Some(_) => 3,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::L(a) => cmd_l(a),
        Command::Zeros(a) => cmd_zeros(a),
        Command::Flow(a) => cmd_flow(&a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Sigma(a) => cmd_sigma(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
