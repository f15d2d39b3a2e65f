//! Command entry points. Each `cmd_*` returns the process exit code:
//! 0 for a second-order stationary point, 2 for a saddle or a run that did
//! not converge, 1 for configuration and I/O errors.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{error, info};
use serde::Serialize;

use crate::baselines::{flow, FlowParams, Scheme};
use crate::config::RunConfig;
use crate::driver;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::io::{self, RunSummary};
use crate::method::{run_method, Method};
use crate::model::ModelParams;
use crate::phases::{self, write_sweep_csv, PhaseSeed, SweepSpec};
use crate::spectrum::{analyze, Classification, SpectrumReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NOT_SP2: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "landau-tr", version, about = "Second-order stationary points of Landau-Brazovskii energies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a solver from a seed and certify the result.
    Solve(CommonArgs),
    /// Smallest Hessian eigenvalues of a field dump.
    Eigs {
        /// Field dump to analyze (`.bin`, `.json` or the common stem).
        #[arg(long)]
        field: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sweep a (tau, gamma) grid over candidate phases.
    Sweep(CommonArgs),
    /// Restart the trust-region method from snapshots of a gradient flow.
    Compare(CommonArgs),
    /// Write the initial condition of a config as a field dump.
    Seed(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Run configuration (TOML, or JSON by extension).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Solver: tr, sis or ssis1.
    #[arg(long)]
    pub method: Option<Method>,
    /// Worker threads for sweeps.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of eigenvalues to compute.
    #[arg(long = "m")]
    pub m: Option<usize>,
}

impl CommonArgs {
    fn load(&self) -> Result<RunConfig> {
        let path = self.config.as_ref().ok_or_else(|| Error::Config("--config is required".into()))?;
        let mut cfg = RunConfig::load(path)?;
        self.apply(&mut cfg)?;
        Ok(cfg)
    }

    fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        if let Some(out) = &self.out {
            cfg.output = Some(out.clone());
        }
        if let Some(m) = self.method {
            cfg.solver.method = m;
        }
        if let Some(j) = self.jobs {
            cfg.jobs = j;
        }
        if let Some(s) = self.seed {
            cfg.rng_seed = s;
        }
        if let Some(m) = self.m {
            cfg.eigs.m = m;
        }
        cfg.validate()
    }
}

fn out_dir(cfg: &RunConfig) -> PathBuf {
    cfg.output.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn exit_for(class: Classification, converged: bool) -> i32 {
    if converged && class == Classification::SecondOrder {
        EXIT_OK
    } else {
        EXIT_NOT_SP2
    }
}

fn report_or_exit(result: Result<i32>) -> i32 {
    result.unwrap_or_else(|err| {
        error!("{err}");
        eprintln!("error: {err}");
        EXIT_FAILURE
    })
}

/// The configured initial field on the configured grid.
pub fn initial_field(cfg: &RunConfig) -> Result<SpectralField> {
    let grid = cfg.grid.build()?.shared();
    if let Some(file) = &cfg.seed.file {
        return Ok(io::read_spectral_dump(file, Some(&grid))?.0);
    }
    let name = cfg.seed.name.ok_or_else(|| Error::Config("seed needs a name or a file".into()))?;
    PhaseSeed::standard(name, cfg.seed.amplitude).to_field(&grid, cfg.rng_seed)
}

fn print_spectrum(report: &SpectrumReport) {
    for (i, (s, r)) in report.eigenvalues.iter().zip(&report.residuals).enumerate() {
        println!("sigma{} = {:+.12e}  (residual {:.2e})", i + 1, s, r);
    }
}

fn summary(method: Method, p: &ModelParams, out: &crate::method::RunOutcome, report: &SpectrumReport) -> RunSummary {
    RunSummary {
        method: method.to_string(),
        tau: p.tau,
        gamma: p.gamma,
        energy: out.energy,
        grad_inf: out.grad_inf,
        converged: out.converged,
        iterations: out.iterations,
        classification: report.classification.map(|c| c.to_string()).unwrap_or_default(),
        eigenvalues: report.eigenvalues.clone(),
        eig_residuals: report.residuals.clone(),
    }
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<i32> {
    let p = cfg.model();
    let v0 = initial_field(cfg)?;
    let method = cfg.solver.method;
    info!("solving with {method} at tau = {}, gamma = {}", p.tau, p.gamma);
    let out = run_method(method, v0, &p, &cfg.tr_params(), &cfg.solver.flow)?;
    info!("{method}: E = {:.12e}, |g|_inf = {:.3e}, {} iterations", out.energy, out.grad_inf, out.iterations);
    let report = analyze(&out.v, &p, &cfg.eigs.options(cfg.rng_seed), cfg.solver.tr.eps)?;
    let class = report.classification.unwrap_or(Classification::NonStationary);
    let dir = out_dir(cfg);
    io::write_with(&dir.join("trace.csv"), |w| out.trace.write_csv(w))?;
    io::write_spectral_dump(&dir.join("final"), &out.v, &p, Some(out.energy))?;
    io::write_json(&dir.join("summary.json"), &summary(method, &p, &out, &report))?;
    println!("energy = {:.12e}", out.energy);
    println!("grad_inf = {:.3e}", out.grad_inf);
    print_spectrum(&report);
    println!("class = {class}");
    Ok(exit_for(class, out.converged))
}

#[derive(Debug, Serialize)]
struct EigsOutput {
    tau: f64,
    gamma: f64,
    grad_inf: f64,
    classification: String,
    eigenvalues: Vec<f64>,
    residuals: Vec<f64>,
    converged: bool,
}

/// Spectrum of a dump. Model parameters come from the config when given,
/// otherwise from the dump's sidecar.
pub fn cmd_eigs(field: &Path, cfg: Option<&RunConfig>, m: Option<usize>, out: Option<&Path>) -> Result<i32> {
    let (u, header) = io::read_spectral_dump(field, None)?;
    let p = match cfg {
        Some(c) => c.model(),
        None => ModelParams::new(header.tau, header.gamma)?,
    };
    let eig_cfg = cfg.map(|c| c.eigs.clone()).unwrap_or_default();
    let mut opts = eig_cfg.options(cfg.map_or(0, |c| c.rng_seed));
    if let Some(m) = m {
        opts.m = m;
    }
    let eps = cfg.map_or(driver::TRParams::default().eps, |c| c.solver.tr.eps);
    let report = analyze(&u, &p, &opts, eps)?;
    let g = crate::model::gradient(&u, &p)?;
    let class = report.classification.unwrap_or(Classification::NonStationary);
    print_spectrum(&report);
    println!("class = {class}");
    if let Some(dir) = out {
        let rows = vec![(0usize, report.eigenvalues.clone())];
        io::write_with(&dir.join("eigs.csv"), |w| crate::spectrum::write_eigen_trace(w, &rows))?;
        io::write_json(
            &dir.join("eigs.json"),
            &EigsOutput {
                tau: p.tau,
                gamma: p.gamma,
                grad_inf: g.max_abs(),
                classification: class.to_string(),
                eigenvalues: report.eigenvalues.clone(),
                residuals: report.residuals.clone(),
                converged: report.converged,
            },
        )?;
    }
    Ok(exit_for(class, report.converged))
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<i32> {
    let sw = cfg.sweep.clone().ok_or_else(|| Error::Config("config has no [sweep] section".into()))?;
    let spec = SweepSpec {
        taus: sw.taus,
        gammas: sw.gammas,
        candidates: sw.candidates,
        m: cfg.grid.m,
        tr: cfg.tr_params(),
        flow: cfg.solver.flow,
        eig: cfg.eigs.options(cfg.rng_seed),
        jobs: cfg.jobs,
        warm_start: sw.warm_start,
        seed: cfg.rng_seed,
    };
    let cells = phases::sweep(&spec)?;
    let dir = out_dir(cfg);
    io::write_with(&dir.join("sweep.csv"), |w| write_sweep_csv(w, &cells))?;
    for cell in &cells {
        if let Some(win) = cell.winner_result() {
            println!("tau = {:+.4}, gamma = {:.4}: {} (E = {:.10e})", cell.tau, cell.gamma, win.candidate, win.energy);
            if let Some(v) = &win.field {
                let p = ModelParams::new(cell.tau, cell.gamma)?;
                let stem = dir.join(format!("winner_tau{}_gamma{}_{}", cell.tau, cell.gamma, win.candidate));
                io::write_spectral_dump(&stem, v, &p, Some(win.energy))?;
            }
        } else {
            println!("tau = {:+.4}, gamma = {:.4}: no SP-II", cell.tau, cell.gamma);
        }
    }
    Ok(EXIT_OK)
}

/// One trust-region leg of a comparison run.
#[derive(Debug, Clone, Serialize)]
pub struct CompareLeg {
    pub stage: String,
    pub flow_step: usize,
    pub start_energy: f64,
    pub final_energy: f64,
    pub grad_inf: f64,
    pub converged: bool,
    pub monotone: bool,
    pub classification: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub flow_method: String,
    pub flow_energy: f64,
    pub flow_converged: bool,
    pub legs: Vec<CompareLeg>,
    pub spread: f64,
}

/// Gradient flow with snapshots, then trust-region restarts from each.
pub fn compare(cfg: &RunConfig, v0: SpectralField) -> Result<CompareReport> {
    let p = cfg.model();
    let method = match cfg.solver.method {
        Method::Tr => Method::Sis,
        m => m,
    };
    let scheme = if method == Method::Sis { Scheme::Sis } else { Scheme::Ssis1 };
    let mid = cfg.compare.intermediate_step;
    let mut snapshots: Vec<(String, usize, SpectralField)> = Vec::new();
    let fp = FlowParams { grad_tol: cfg.compare.flow_grad_tol, ..cfg.solver.flow };
    let flow_out = flow(scheme, v0, &p, &fp, |step, v| {
        if step == 0 {
            snapshots.push(("initial".into(), 0, v.clone()));
        } else if step == mid {
            snapshots.push(("intermediate".into(), step, v.clone()));
        }
    })?;
    snapshots.push(("converged".into(), flow_out.steps, flow_out.v.clone()));
    info!("{method}: E = {:.12e} after {} steps", flow_out.energy, flow_out.steps);

    let tp = cfg.tr_params();
    let eig = cfg.eigs.options(cfg.rng_seed);
    let mut legs = Vec::new();
    for (stage, step, v) in snapshots {
        let start_energy = crate::model::energy(&v, &p)?;
        let out = driver::run(v, &p, &tp)?;
        let report = analyze(&out.v, &p, &eig, tp.eps)?;
        info!("{stage} restart: E = {:.12e}", out.energy);
        legs.push(CompareLeg {
            stage,
            flow_step: step,
            start_energy,
            final_energy: out.energy,
            grad_inf: out.grad_inf,
            converged: out.converged,
            monotone: out.trace.monotone(tp.theta),
            classification: report.classification.map(|c| c.to_string()).unwrap_or_default(),
        });
    }
    let lo = legs.iter().map(|l| l.final_energy).fold(f64::INFINITY, f64::min);
    let hi = legs.iter().map(|l| l.final_energy).fold(f64::NEG_INFINITY, f64::max);
    Ok(CompareReport {
        flow_method: method.to_string(),
        flow_energy: flow_out.energy,
        flow_converged: flow_out.converged,
        legs,
        spread: hi - lo,
    })
}

pub fn cmd_compare(cfg: &RunConfig) -> Result<i32> {
    let report = compare(cfg, initial_field(cfg)?)?;
    let dir = out_dir(cfg);
    io::write_json(&dir.join("compare.json"), &report)?;
    io::write_with(&dir.join("compare.csv"), |w| {
        use std::io::Write;
        writeln!(w, "stage,flow_step,start_energy,final_energy,grad_inf,class")?;
        for l in &report.legs {
            writeln!(
                w,
                "{},{},{:.15e},{:.15e},{:.3e},{}",
                l.stage, l.flow_step, l.start_energy, l.final_energy, l.grad_inf, l.classification
            )?;
        }
        Ok(())
    })?;
    for l in &report.legs {
        println!("{:>12}: {:.12e} -> {:.12e} ({})", l.stage, l.start_energy, l.final_energy, l.classification);
    }
    println!("spread = {:.3e}", report.spread);
    let all_sp2 = report.legs.iter().all(|l| l.converged && l.classification == Classification::SecondOrder.as_str());
    Ok(if all_sp2 && report.spread <= cfg.compare.energy_tol { EXIT_OK } else { EXIT_NOT_SP2 })
}

pub fn cmd_seed(cfg: &RunConfig) -> Result<i32> {
    let v = initial_field(cfg)?;
    let p = cfg.model();
    let e = crate::model::energy(&v, &p)?;
    let dir = out_dir(cfg);
    io::write_spectral_dump(&dir.join("seed"), &v, &p, Some(e))?;
    println!("seed energy = {e:.12e}");
    Ok(EXIT_OK)
}

/// Parses `args` and runs the selected command.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Solve(a) => report_or_exit(a.load().and_then(|c| cmd_solve(&c))),
        Command::Sweep(a) => report_or_exit(a.load().and_then(|c| cmd_sweep(&c))),
        Command::Compare(a) => report_or_exit(a.load().and_then(|c| cmd_compare(&c))),
        Command::Seed(a) => report_or_exit(a.load().and_then(|c| cmd_seed(&c))),
        Command::Eigs { field, common } => report_or_exit((|| {
            let cfg = match &common.config {
                Some(_) => Some(common.load()?),
                None => None,
            };
            let out = common.out.clone().or_else(|| cfg.as_ref().and_then(|c| c.output.clone()));
            cmd_eigs(&field, cfg.as_ref(), common.m, out.as_deref())
        })()),
    }
}

