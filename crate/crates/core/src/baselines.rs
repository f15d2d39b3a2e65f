//! Semi-implicit gradient flows used as first-order baselines.
//!
//! SIS:   `v+ = (1 + dt Lambda)^-1 (v - dt F[f'(psi)])`
//! SSIS1: `v+ = (1 + dt (Lambda + S))^-1 (v + dt S v - dt F[f'(psi)])`
//!
//! With `S = 0` the two coincide.

use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{self, SpectralField};
use crate::model::{hessian_at, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Sis,
    Ssis1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowParams {
    pub dt: f64,
    /// Stabilization `S` for SSIS1; `None` uses the bound on `|T|` at the start.
    pub stab: Option<f64>,
    pub max_steps: usize,
    pub grad_tol: f64,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self { dt: 0.1, stab: None, max_steps: 200_000, grad_tol: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowRecord {
    pub step: usize,
    pub energy: f64,
    pub grad_inf: f64,
    pub step_norm: f64,
    pub ms: f64,
}

#[derive(Debug, Clone)]
pub struct FlowOutcome {
    pub v: SpectralField,
    pub energy: f64,
    pub grad_inf: f64,
    pub converged: bool,
    pub steps: usize,
    pub trace: Vec<FlowRecord>,
}

/// Writes a flow trace in the trust-region trace layout, branch `flow`.
pub fn write_flow_csv<W: Write>(mut out: W, trace: &[FlowRecord]) -> std::io::Result<()> {
    writeln!(out, "{}", crate::driver::TRACE_HEADER)?;
    for r in trace {
        writeln!(
            out,
            "{},{:.17e},{:.6e},{:.6e},,,flow,0,{:.3}",
            r.step, r.energy, r.grad_inf, r.step_norm, r.ms
        )?;
    }
    Ok(())
}

pub fn sis_run(v0: SpectralField, p: &ModelParams, fp: &FlowParams) -> Result<FlowOutcome> {
    flow(Scheme::Sis, v0, p, fp, |_, _| {})
}

pub fn ssis1_run(v0: SpectralField, p: &ModelParams, fp: &FlowParams) -> Result<FlowOutcome> {
    flow(Scheme::Ssis1, v0, p, fp, |_, _| {})
}

/// Runs a scheme, calling `observe(step, v)` before every update.
pub fn flow(
    scheme: Scheme,
    v0: SpectralField,
    p: &ModelParams,
    fp: &FlowParams,
    mut observe: impl FnMut(usize, &SpectralField),
) -> Result<FlowOutcome> {
    if !(fp.dt > 0.0) || !(fp.grad_tol > 0.0) {
        return Err(Error::Config("flow needs dt > 0 and grad_tol > 0".into()));
    }
    if v0.coeffs()[0].norm() != 0.0 || !v0.is_mean_pinned() {
        return Err(Error::MeanNotPinned(v0.coeffs()[0].norm()));
    }
    let stab = match scheme {
        Scheme::Sis => 0.0,
        Scheme::Ssis1 => match fp.stab {
            Some(s) if s >= 0.0 => s,
            Some(s) => return Err(Error::Config(format!("stabilization must be nonnegative, got {s}"))),
            None => hessian_at(&v0, p)?.t_norm_bound(),
        },
    };
    let grid = v0.grid().clone();
    let n = grid.len();
    let sym = grid.laplacian_symbol().to_vec();
    let denom: Vec<f64> = sym.iter().map(|l| 1.0 / (1.0 + fp.dt * (l + stab))).collect();
    let mut v = v0;
    let mut trace = Vec::new();
    let mut buf = vec![Complex64::default(); n];
    let mut psi = vec![0.0; n];
    let mut prev_energy = f64::INFINITY;

    for step in 0..=fp.max_steps {
        let started = Instant::now();
        observe(step, &v);
        grid.fft().inverse_real(v.coeffs(), &mut psi);
        let mut bulk = 0.0;
        for x in psi.iter_mut() {
            bulk += p.bulk(*x);
            *x = p.bulk_d1(*x);
        }
        field::forward_real(&grid, &psi, &mut buf);
        buf[0] = Complex64::default();
        let coeffs = v.coeffs();
        let mut interaction = 0.0;
        let mut g_inf: f64 = 0.0;
        for k in 0..n {
            interaction += sym[k] * coeffs[k].norm_sqr();
            g_inf = g_inf.max((coeffs[k] * sym[k] + buf[k]).norm());
        }
        let energy = 0.5 * interaction + bulk / n as f64;
        if energy > prev_energy + 1.0 || !energy.is_finite() {
            return Err(Error::Diverged(format!(
                "{scheme:?} energy rose from {prev_energy:e} to {energy:e} at step {step}; reduce dt"
            )));
        }
        prev_energy = energy;
        if g_inf < fp.grad_tol || step == fp.max_steps {
            trace.push(FlowRecord { step, energy, grad_inf: g_inf, step_norm: 0.0, ms: 0.0 });
            return Ok(FlowOutcome { v, energy, grad_inf: g_inf, converged: g_inf < fp.grad_tol, steps: step, trace });
        }
        let mut step_sq = 0.0;
        let c = v.coeffs_mut();
        for k in 1..n {
            let next = (c[k] * (1.0 + fp.dt * stab) - buf[k] * fp.dt) * denom[k];
            step_sq += (next - c[k]).norm_sqr();
            c[k] = next;
        }
        trace.push(FlowRecord {
            step,
            energy,
            grad_inf: g_inf,
            step_norm: step_sq.sqrt(),
            ms: started.elapsed().as_secs_f64() * 1e3,
        });
    }
    unreachable!("loop returns at max_steps")
}
