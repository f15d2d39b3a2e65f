//! Run configuration, read from TOML or JSON.
//!
//! ```toml
//! output = "out/example1"
//! rng_seed = 0
//!
//! [model]
//! tau = -0.35
//! gamma = 0.7
//!
//! [grid]
//! m = 32
//! domain = "lam"        # or box_length = 8.885..., or b = [9 entries, row-major]
//!
//! [seed]
//! name = "LAM"
//!
//! [solver]
//! method = "tr"
//! [solver.tr]
//! eps = 1e-10
//! ```
//!
//! Unknown keys are rejected at every level.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::FlowParams;
use crate::driver::TRParams;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::method::Method;
use crate::model::ModelParams;
use crate::phases::{Candidate, PhaseSeed, SeedName, DEFAULT_AMPLITUDE};
use crate::spectrum::EigOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub m: usize,
    #[serde(default = "default_dim")]
    pub d: usize,
    /// Named cubic cell: the natural cell of a seed (`lam`, `hex`, ...).
    #[serde(default)]
    pub domain: Option<String>,
    /// Edge of a cubic cell.
    #[serde(default)]
    pub box_length: Option<f64>,
    /// Reciprocal matrix, row-major.
    #[serde(default)]
    pub b: Option<Vec<f64>>,
}

fn default_dim() -> usize {
    3
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid> {
        let given = [self.domain.is_some(), self.box_length.is_some(), self.b.is_some()];
        if given.iter().filter(|g| **g).count() != 1 {
            return Err(Error::Config("grid needs exactly one of domain, box_length or b".into()));
        }
        if let Some(name) = &self.domain {
            let seed: SeedName = name.parse().map_err(|_| Error::Config(format!("unknown domain '{name}'")))?;
            if seed == SeedName::Random {
                return Err(Error::Config("RANDOM has no natural domain".into()));
            }
            let len = PhaseSeed::standard(seed, DEFAULT_AMPLITUDE).box_length();
            return Grid::cubic(self.m, self.d, len);
        }
        if let Some(len) = self.box_length {
            if !(len > 0.0) {
                return Err(Error::Config(format!("box_length must be positive, got {len}")));
            }
            return Grid::cubic(self.m, self.d, len);
        }
        Grid::new(self.m, self.d, self.b.as_deref().unwrap_or_default())
    }
}

fn default_amplitude() -> f64 {
    DEFAULT_AMPLITUDE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedConfig {
    #[serde(default)]
    pub name: Option<SeedName>,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    /// Start from a field dump instead of a named seed.
    #[serde(default)]
    pub file: Option<PathBuf>,
}

impl Default for SeedConfig {
    fn default() -> Self {
        Self { name: Some(SeedName::Random), amplitude: DEFAULT_AMPLITUDE, file: None }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub tr: TRParams,
    #[serde(default)]
    pub flow: FlowParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EigConfig {
    pub m: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub neg_tol: f64,
}

impl Default for EigConfig {
    fn default() -> Self {
        Self { m: 4, tol: 1e-8, max_iter: 1000, neg_tol: crate::spectrum::DEFAULT_NEG_TOL }
    }
}

impl EigConfig {
    pub fn options(&self, seed: u64) -> EigOptions {
        EigOptions { m: self.m, tol: self.tol, seed, max_iter: self.max_iter, ..EigOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub taus: Vec<f64>,
    pub gammas: Vec<f64>,
    pub candidates: Vec<Candidate>,
    #[serde(default)]
    pub warm_start: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    /// Flow step at which the intermediate snapshot is taken.
    pub intermediate_step: usize,
    /// Largest tolerated spread of the restarted energies.
    pub energy_tol: f64,
    /// Stationarity tolerance of the flow in `compare`. It is looser than the
    /// trust-region tolerance so the last snapshot is not already accepted
    /// as stationary by the restart.
    pub flow_grad_tol: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self { intermediate_step: 200, energy_tol: 1e-6, flow_grad_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParams,
    pub grid: GridConfig,
    #[serde(default)]
    pub seed: SeedConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub eigs: EigConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub compare: CompareConfig,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
}

fn default_jobs() -> usize {
    1
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a `.json` file as JSON and anything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        ModelParams::new(self.model.tau, self.model.gamma)?;
        self.grid.build()?;
        self.solver.tr.validate()?;
        if self.seed.name.is_none() && self.seed.file.is_none() {
            return Err(Error::Config("seed needs a name or a file".into()));
        }
        if self.eigs.m == 0 || self.eigs.m > 16 || !(self.eigs.tol > 0.0) {
            return Err(Error::Config("eigs needs 1 <= m <= 16 and tol > 0".into()));
        }
        if !(self.solver.flow.dt > 0.0) {
            return Err(Error::Config("flow dt must be positive".into()));
        }
        if self.jobs == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        if let Some(sw) = &self.sweep {
            if sw.taus.is_empty() || sw.gammas.is_empty() || sw.candidates.is_empty() {
                return Err(Error::Config("sweep needs nonempty taus, gammas and candidates".into()));
            }
        }
        Ok(())
    }

    pub fn model(&self) -> ModelParams {
        self.model
    }

    /// Seeds the TR parameter RNG from the run seed.
    pub fn tr_params(&self) -> TRParams {
        let mut tp = self.solver.tr;
        tp.seed = self.rng_seed;
        tp
    }
}
