//! The JSON experiment document and its resolution into library handles.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use zetaflow::dirichlet::{prime_characters, principal_character, CharacterTable, LFunctionHandle};
use zetaflow::flow_pde::InitialDatum;
use zetaflow::special::EvalConfig;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum Nonlinearity {
    #[default]
    Zeta,
    Principal {
        m: usize,
    },
    /// Character `index` of the group mod the prime `p`, built from the
    /// smallest primitive root; index 0 is principal.
    Prime {
        p: usize,
        index: usize,
    },
    /// JSON file `{"period": m, "values": [[re, im], ...]}`.
    Character {
        path: PathBuf,
    },
}

impl Nonlinearity {
    pub fn character(&self) -> Result<Option<CharacterTable>> {
        Ok(match self {
            Nonlinearity::Zeta => None,
            Nonlinearity::Principal { m } => {
                if *m == 0 {
                    bail!("principal character needs m >= 1");
                }
                Some(principal_character(*m))
            }
            Nonlinearity::Prime { p, index } => {
                let mut all = prime_characters(*p)?;
                if *index >= all.len() {
                    bail!("character index {index} out of range for p = {p}");
                }
                Some(all.swap_remove(*index))
            }
            Nonlinearity::Character { path } => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading character file {}", path.display()))?;
                Some(CharacterTable::from_json(&text)?)
            }
        })
    }

    pub fn handle(&self, eval: EvalConfig) -> Result<LFunctionHandle> {
        Ok(match self.character()? {
            None => LFunctionHandle::zeta(eval)?,
            Some(ch) => LFunctionHandle::new(ch, eval)?,
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Ode,
    #[default]
    Pde,
    Picard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSettings {
    pub n: usize,
    pub dims: usize,
    pub length: f64,
}

impl Default for GridSettings {
    fn default() -> Self {
        GridSettings {
            n: 32,
            dims: 1,
            length: 2.0 * std::f64::consts::PI,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub t_end: f64,
    pub dt: f64,
    pub pole_guard_eps: f64,
    pub rtol: f64,
    pub atol: f64,
    pub snapshot_every: Option<usize>,
    /// Early stop once sup |u − z| < tol, z the disc centre or constant value.
    pub stop_tol: Option<f64>,
    pub picard_iterations: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            t_end: 10.0,
            dt: 1e-3,
            pole_guard_eps: 1e-3,
            rtol: 1e-10,
            atol: 1e-12,
            snapshot_every: None,
            stop_tol: None,
            picard_iterations: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSettings {
    pub dir: PathBuf,
    /// Write one CSV per stored snapshot.
    pub fields: bool,
}

impl Default for OutputSettings {
    fn default() -> Self {
        OutputSettings {
            dir: PathBuf::from("zflow_out"),
            fields: false,
        }
    }
}

fn default_lambda() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    #[serde(default)]
    pub nonlinearity: Nonlinearity,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub datum: Option<InitialDatum>,
    #[serde(default)]
    pub grid: GridSettings,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub eval: EvalConfig,
    #[serde(default)]
    pub check: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            schema: SCHEMA,
            nonlinearity: Nonlinearity::default(),
            lambda: 1.0,
            mode: Mode::default(),
            datum: None,
            grid: GridSettings::default(),
            solver: SolverSettings::default(),
            eval: EvalConfig::default(),
            check: None,
            seed: None,
            output: OutputSettings::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            bail!("unsupported schema {} (expected {SCHEMA})", self.schema);
        }
        if self.lambda != 1.0 && self.lambda != -1.0 {
            bail!("lambda must be +1 or -1, got {}", self.lambda);
        }
        self.eval.validate()?;
        if let Nonlinearity::Character { path } = &self.nonlinearity {
            if !path.is_file() {
                bail!("character file {} not found", path.display());
            }
        }
        if !(self.solver.t_end >= 0.0) || !self.solver.t_end.is_finite() {
            bail!("t_end must be finite and non-negative");
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serialises");
        hex::encode(Sha256::digest(&bytes))
    }
}
