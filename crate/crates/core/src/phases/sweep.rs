//! Parameter sweeps over `(tau, gamma)` with a list of candidate phases.

use std::io::Write;
use std::sync::Arc;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{PhaseSeed, SeedName, DEFAULT_AMPLITUDE};
use crate::baselines::FlowParams;
use crate::driver::TRParams;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::method::{run_method, Method};
use crate::model::ModelParams;
use crate::spectrum::{analyze, Classification, EigOptions};

pub const SWEEP_HEADER: &str = "tau,gamma,candidate,energy,sigma1,class,winner";
/// Energies closer than this count as a tie.
const TIE_TOL: f64 = 1e-10;

fn default_amplitude() -> f64 {
    DEFAULT_AMPLITUDE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Candidate {
    pub seed: SeedName,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default)]
    pub method: Method,
}

impl Candidate {
    pub fn new(seed: SeedName) -> Self {
        Self { seed, amplitude: DEFAULT_AMPLITUDE, method: Method::Tr }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub taus: Vec<f64>,
    pub gammas: Vec<f64>,
    pub candidates: Vec<Candidate>,
    pub m: usize,
    pub tr: TRParams,
    pub flow: FlowParams,
    pub eig: EigOptions,
    /// Worker threads; cells are independent jobs.
    pub jobs: usize,
    /// Start each candidate from its converged field in the previous cell of
    /// the same `tau` row. Rows then run sequentially along `gamma`.
    pub warm_start: bool,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct CandidateResult {
    pub candidate: SeedName,
    pub energy: f64,
    pub grad_inf: f64,
    pub sigma1: f64,
    pub class: Classification,
    pub converged: bool,
    pub error: Option<String>,
    pub field: Option<SpectralField>,
}

#[derive(Debug, Clone)]
pub struct SweepCell {
    pub tau: f64,
    pub gamma: f64,
    pub results: Vec<CandidateResult>,
    /// Index into `results` of the lowest-energy SP-II.
    pub winner: Option<usize>,
}

impl SweepCell {
    pub fn winner_result(&self) -> Option<&CandidateResult> {
        self.winner.map(|i| &self.results[i])
    }

    pub fn result(&self, name: SeedName) -> Option<&CandidateResult> {
        self.results.iter().find(|r| r.candidate == name)
    }
}

/// Writes one row per candidate and cell.
pub fn write_sweep_csv<W: Write>(mut out: W, cells: &[SweepCell]) -> std::io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for cell in cells {
        for (i, r) in cell.results.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{:.12e},{:.6e},{},{}",
                cell.tau,
                cell.gamma,
                r.candidate,
                r.energy,
                r.sigma1,
                r.class,
                u8::from(cell.winner == Some(i))
            )?;
        }
    }
    Ok(())
}

fn pick_winner(tau: f64, gamma: f64, results: &[CandidateResult]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, r) in results.iter().enumerate() {
        if r.class != Classification::SecondOrder || r.error.is_some() {
            continue;
        }
        match best {
            None => best = Some(i),
            Some(b) => {
                let eb = results[b].energy;
                if (r.energy - eb).abs() <= TIE_TOL {
                    info!(
                        "cell ({tau}, {gamma}): {} ties with {}; keeping the earlier candidate",
                        r.candidate, results[b].candidate
                    );
                } else if r.energy < eb {
                    best = Some(i);
                }
            }
        }
    }
    best
}

struct Grids {
    grids: Vec<Arc<Grid>>,
}

impl Grids {
    fn new(spec: &SweepSpec) -> Result<Self> {
        let grids = spec
            .candidates
            .iter()
            .map(|c| {
                let s = PhaseSeed::standard(c.seed, c.amplitude);
                let grid = if c.seed == SeedName::Random {
                    // the RANDOM seed has no cell of its own; use the HEX cell
                    PhaseSeed::standard(SeedName::Hex, c.amplitude).natural_grid(spec.m)?
                } else {
                    s.natural_grid(spec.m)?
                };
                Ok(grid.shared())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grids })
    }
}

fn run_candidate(
    spec: &SweepSpec,
    cand: &Candidate,
    grid: &Arc<Grid>,
    p: &ModelParams,
    start: Option<&SpectralField>,
) -> CandidateResult {
    let attempt = || -> Result<CandidateResult> {
        let v0 = match start {
            Some(v) => v.clone(),
            None => PhaseSeed::standard(cand.seed, cand.amplitude).to_field(grid, spec.seed)?,
        };
        let out = run_method(cand.method, v0, p, &spec.tr, &spec.flow)?;
        let report = analyze(&out.v, p, &spec.eig, spec.tr.eps)?;
        let class = report.classification.unwrap_or(Classification::NonStationary);
        Ok(CandidateResult {
            candidate: cand.seed,
            energy: out.energy,
            grad_inf: out.grad_inf,
            sigma1: report.eigenvalues.first().copied().unwrap_or(f64::NAN),
            class,
            converged: out.converged,
            error: None,
            field: Some(out.v),
        })
    };
    attempt().unwrap_or_else(|err| {
        warn!("candidate {} at ({}, {}) failed: {err}", cand.seed, p.tau, p.gamma);
        CandidateResult {
            candidate: cand.seed,
            energy: f64::NAN,
            grad_inf: f64::NAN,
            sigma1: f64::NAN,
            class: Classification::NonStationary,
            converged: false,
            error: Some(err.to_string()),
            field: None,
        }
    })
}

fn finish_cell(tau: f64, gamma: f64, mut results: Vec<CandidateResult>) -> SweepCell {
    let winner = pick_winner(tau, gamma, &results);
    for (i, r) in results.iter_mut().enumerate() {
        if Some(i) != winner {
            r.field = None;
        }
    }
    SweepCell { tau, gamma, results, winner }
}

/// Runs every candidate in every cell. Cells come back in row-major order
/// (`tau` outer, `gamma` inner) regardless of scheduling.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepCell>> {
    if spec.taus.is_empty() || spec.gammas.is_empty() || spec.candidates.is_empty() {
        return Err(Error::Config("sweep needs nonempty tau, gamma and candidate lists".into()));
    }
    let grids = Grids::new(spec)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;

    let cells: Vec<SweepCell> = if spec.warm_start {
        let rows: Vec<Result<Vec<SweepCell>>> = pool.install(|| {
            spec.taus
                .par_iter()
                .map(|&tau| {
                    let mut previous: Vec<Option<SpectralField>> = vec![None; spec.candidates.len()];
                    let mut row = Vec::with_capacity(spec.gammas.len());
                    for &gamma in &spec.gammas {
                        let p = ModelParams::new(tau, gamma)?;
                        let results: Vec<CandidateResult> = spec
                            .candidates
                            .iter()
                            .enumerate()
                            .map(|(i, c)| {
                                let r = run_candidate(spec, c, &grids.grids[i], &p, previous[i].as_ref());
                                if r.field.is_some() {
                                    previous[i].clone_from(&r.field);
                                }
                                r
                            })
                            .collect();
                        row.push(finish_cell(tau, gamma, results));
                    }
                    Ok(row)
                })
                .collect()
        });
        let mut cells = Vec::new();
        for row in rows {
            cells.extend(row?);
        }
        cells
    } else {
        let jobs: Vec<(f64, f64)> =
            spec.taus.iter().flat_map(|&t| spec.gammas.iter().map(move |&g| (t, g))).collect();
        let cells: Vec<Result<SweepCell>> = pool.install(|| {
            jobs.par_iter()
                .map(|&(tau, gamma)| {
                    let p = ModelParams::new(tau, gamma)?;
                    let results = spec
                        .candidates
                        .iter()
                        .enumerate()
                        .map(|(i, c)| run_candidate(spec, c, &grids.grids[i], &p, None))
                        .collect();
                    Ok(finish_cell(tau, gamma, results))
                })
                .collect()
        });
        cells.into_iter().collect::<Result<Vec<_>>>()?
    };
    Ok(cells)
}
