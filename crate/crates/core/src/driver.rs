//! Outer trust-region loop with a cubic-scaled acceptance ratio.
//!
//! Each iteration solves the subproblem for a step `s`, measures
//! `rho = (E(v) - E(v + s)) / |s|^3` and then accepts the step, contracts the
//! radius, or caps it at `lambda / mu`. Contraction solves shifted Newton
//! systems `(H + lambda I) s = -g` to pick the next radius.

use std::io::Write;
use std::time::Instant;

use log::{debug, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::krylov::solve_shifted;
use crate::model::{energy_and_gradient, energy_change, hessian_at, HessianOperator, ModelParams};
use crate::operator::SplitHessian;
use crate::subproblem::{self, default_eta, SubproblemOptions, SubproblemSpec};

/// Steps shorter than this skip the acceptance ratio.
pub const NULL_STEP: f64 = 1e-14;
const MAX_ESCALATIONS: usize = 20;
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TRParams {
    pub theta: f64,
    pub gamma_c: f64,
    pub gamma_e: f64,
    pub gamma_lambda: f64,
    pub mu_lo: f64,
    pub mu_hi: f64,
    pub mu0: f64,
    pub r0: f64,
    pub nu0: f64,
    /// Termination tolerance on `max_k |g_k|`.
    pub eps: f64,
    pub max_iters: usize,
    pub subproblem: SubproblemOptions,
    /// Size of a random perturbation added to the subproblem starting point,
    /// relative to the radius. Zero disables it.
    pub start_jitter: f64,
    pub seed: u64,
}

impl Default for TRParams {
    fn default() -> Self {
        Self {
            theta: 1e-4,
            gamma_c: 0.5,
            gamma_e: 2.0,
            gamma_lambda: 1.5,
            mu_lo: 1.0,
            mu_hi: 1e5,
            mu0: 1.0,
            r0: 1.0,
            nu0: 5.0,
            eps: 1e-10,
            max_iters: 2000,
            subproblem: SubproblemOptions::default(),
            start_jitter: 0.0,
            seed: 0,
        }
    }
}

impl TRParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("trust-region parameter out of range: {what}")));
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return bad("theta must lie in (0, 1)");
        }
        if !(self.gamma_c > 0.0 && self.gamma_c < 1.0) {
            return bad("gamma_c must lie in (0, 1)");
        }
        if !(self.gamma_e > 1.0) || !(self.gamma_lambda > 1.0) {
            return bad("gamma_e and gamma_lambda must exceed 1");
        }
        if !(self.mu_lo > 0.0 && self.mu_lo <= self.mu_hi && self.mu0 >= self.mu_lo) {
            return bad("need 0 < mu_lo <= mu_hi and mu0 >= mu_lo");
        }
        if !(self.r0 > 0.0 && self.r0 <= self.nu0) {
            return bad("need 0 < r0 <= nu0");
        }
        if !(self.eps > 0.0) || self.max_iters == 0 {
            return bad("eps and max_iters must be positive");
        }
        if !(self.subproblem.eps_sub > 0.0) || self.subproblem.max_outer == 0 || !(self.subproblem.descent_a > 0.0) {
            return bad("subproblem tolerances must be positive");
        }
        if !(self.start_jitter >= 0.0) {
            return bad("start_jitter must be nonnegative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Accept,
    Contract,
    Cap,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Accept => "accept",
            Branch::Contract => "contract",
            Branch::Cap => "cap",
        }
    }
}

/// One outer iteration. `energy` and `grad_inf` refer to the iterate the
/// step was computed at; `energy_after` is set on accepted steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub energy: f64,
    pub grad_inf: f64,
    pub step_norm: f64,
    pub lambda: f64,
    pub rho: Option<f64>,
    pub branch: Branch,
    pub sub_iters: usize,
    pub sub_converged: bool,
    pub energy_after: Option<f64>,
    pub radius: f64,
    pub ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TRTrace {
    pub records: Vec<TraceRecord>,
}

pub const TRACE_HEADER: &str = "iter,energy,grad_inf,step_norm,lambda,rho,branch,sub_iters,ms";

impl TRTrace {
    pub fn accepted(&self) -> impl Iterator<Item = &TraceRecord> {
        self.records.iter().filter(|r| r.branch == Branch::Accept)
    }

    /// Checks `E(v_{j+1}) <= E(v_j) - theta |s_j|^3` on every accepted step.
    pub fn monotone(&self, theta: f64) -> bool {
        self.accepted().all(|r| match r.energy_after {
            Some(after) => after <= r.energy - theta * r.step_norm.powi(3),
            None => true,
        })
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{TRACE_HEADER}")?;
        for r in &self.records {
            let rho = r.rho.map(|v| format!("{v:.17e}")).unwrap_or_default();
            writeln!(
                out,
                "{},{:.17e},{:.6e},{:.6e},{:.6e},{},{},{},{:.3}",
                r.iter,
                r.energy,
                r.grad_inf,
                r.step_norm,
                r.lambda,
                rho,
                r.branch.as_str(),
                r.sub_iters,
                r.ms
            )?;
        }
        Ok(())
    }
}

/// Loop state between iterations.
#[derive(Debug, Clone)]
pub struct TRState {
    pub v: SpectralField,
    pub r: f64,
    pub nu: f64,
    pub mu: f64,
    pub j: usize,
    pub last_rho: Option<f64>,
    pub trace: TRTrace,
}

impl TRState {
    pub fn new(v0: SpectralField, tp: &TRParams) -> Self {
        Self { v: v0, r: tp.r0, nu: tp.nu0, mu: tp.mu0, j: 0, last_rho: None, trace: TRTrace::default() }
    }
}

#[derive(Debug, Clone)]
pub struct TROutcome {
    pub v: SpectralField,
    pub energy: f64,
    pub grad_inf: f64,
    pub converged: bool,
    pub iterations: usize,
    pub trace: TRTrace,
}

/// Runs the trust-region method from `v0` until `max |g_k| < eps`.
pub fn run(v0: SpectralField, p: &ModelParams, tp: &TRParams) -> Result<TROutcome> {
    run_with_observer(v0, p, tp, |_| {})
}

/// As [`run`], calling `observe` after every iteration.
pub fn run_with_observer(
    v0: SpectralField,
    p: &ModelParams,
    tp: &TRParams,
    mut observe: impl FnMut(&TRState),
) -> Result<TROutcome> {
    tp.validate()?;
    if !v0.is_mean_pinned() || v0.coeffs()[0].norm() != 0.0 {
        return Err(Error::MeanNotPinned(v0.coeffs()[0].norm()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(tp.seed);
    let mut st = TRState::new(v0, tp);

    loop {
        let (e, g) = energy_and_gradient(&st.v, p)?;
        let g_inf = g.max_abs();
        if g_inf < tp.eps || st.j >= tp.max_iters {
            let converged = g_inf < tp.eps;
            if !converged {
                warn!("trust region stopped after {} iterations with |g|_inf = {g_inf:e}", st.j);
            }
            return Ok(TROutcome { v: st.v, energy: e, grad_inf: g_inf, converged, iterations: st.j, trace: st.trace });
        }
        let started = Instant::now();
        let h = hessian_at(&st.v, p)?;
        let eta = default_eta(h.t_norm_bound(), tp.subproblem.eta_mode, tp.subproblem.descent_a);
        let jitter = (tp.start_jitter > 0.0).then(|| random_direction(&h, tp.start_jitter * st.r, &mut rng));
        let spec = SubproblemSpec {
            g: g.as_real(),
            hessian: &h,
            radius: st.r,
            eta,
            eps_sub: tp.subproblem.eps_sub,
            max_outer: tp.subproblem.max_outer,
            descent_a: None,
            start_perturbation: jitter.as_deref(),
            bottom_direction: None,
        };
        let sub = subproblem::solve(&spec);
        let mut s = SpectralField::zeros(st.v.grid().clone());
        s.as_real_mut().copy_from_slice(&sub.d);
        SplitHessian::project(&h, s.as_real_mut());
        s.pin_mean();
        let s_norm = s.norm();
        let lambda = sub.lambda;

        if st.j > 0 && st.last_rho.is_some_and(|rho| rho < tp.theta) && s_norm > 0.0 {
            st.mu = st.mu.max(lambda / s_norm);
        }

        let mut record = TraceRecord {
            iter: st.j,
            energy: e,
            grad_inf: g_inf,
            step_norm: s_norm,
            lambda,
            rho: None,
            branch: Branch::Accept,
            sub_iters: sub.iterations,
            sub_converged: sub.converged,
            energy_after: None,
            radius: st.r,
            ms: 0.0,
        };

        if s_norm < NULL_STEP {
            // nothing to measure; take the null step and re-test the gradient
            debug!("null step at iteration {}", st.j);
            st.v.axpy(1.0, &s)?;
            st.last_rho = None;
        } else {
            let de = energy_change(&st.v, &s, p)?;
            let rho = -de / s_norm.powi(3);
            record.rho = Some(rho);
            st.last_rho = Some(if sub.converged { rho } else { f64::NEG_INFINITY });
            if !sub.converged || rho < tp.theta {
                record.branch = Branch::Contract;
                st.r = contract(&st, tp, s_norm, lambda, &g, &h);
            } else if lambda <= st.mu * s_norm || (s_norm - st.nu).abs() <= 1e-12 * st.nu {
                record.branch = Branch::Accept;
                record.energy_after = Some(e + de);
                st.v.axpy(1.0, &s)?;
                st.nu = st.nu.max(tp.gamma_e * s_norm);
                st.r = st.nu.min(st.r.max(tp.gamma_e * s_norm));
                st.mu = st.mu.max(lambda / s_norm);
            } else {
                record.branch = Branch::Cap;
                st.r = st.nu.min(lambda / st.mu);
            }
        }
        record.ms = started.elapsed().as_secs_f64() * 1e3;
        debug!(
            "iter {} E={:.12e} |g|={:.3e} |s|={:.3e} lambda={:.3e} rho={:?} {} sub={} r={:.3e}",
            record.iter,
            record.energy,
            record.grad_inf,
            record.step_norm,
            record.lambda,
            record.rho,
            record.branch.as_str(),
            record.sub_iters,
            st.r
        );
        st.trace.records.push(record);
        st.j += 1;
        observe(&st);
    }
}

fn random_direction(h: &HessianOperator, size: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = SplitHessian::dim(h);
    let mut x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    SplitHessian::project(h, &mut x);
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v *= size / norm);
    x
}

/// Shifted solve, raising the shift by `gamma_lambda` until the system is definite.
fn shifted_step(h: &HessianOperator, g: &SpectralField, shift: f64, gamma_lambda: f64) -> Option<(f64, f64)> {
    let mut shift = shift;
    for _ in 0..=MAX_ESCALATIONS {
        match solve_shifted(h, shift, g) {
            Ok(s) => return Some((shift, s.norm())),
            Err(err) => {
                debug!("shifted solve failed: {err}");
                shift *= gamma_lambda;
            }
        }
    }
    None
}

/// New radius after a rejected step.
pub fn contract(
    st: &TRState,
    tp: &TRParams,
    s_norm: f64,
    lambda: f64,
    g: &SpectralField,
    h: &HessianOperator,
) -> f64 {
    let fallback = tp.gamma_c * s_norm;
    let radius = if lambda < tp.mu_lo * s_norm {
        let lambda_hat = lambda + (tp.mu_lo * g.norm()).sqrt();
        match shifted_step(h, g, lambda_hat, tp.gamma_lambda) {
            None => fallback,
            Some((shift, norm)) if shift / norm <= tp.mu_hi => norm,
            Some((shift, norm)) => {
                // lambda / |s(lambda)| increases with lambda; bisect into [mu_lo, mu_hi]
                let (mut lo, mut hi) = (lambda, shift);
                let mut best = norm;
                for _ in 0..MAX_HALVINGS {
                    let mid = 0.5 * (lo + hi);
                    match solve_shifted(h, mid, g) {
                        Err(_) => lo = mid,
                        Ok(s) => {
                            let n = s.norm();
                            let ratio = mid / n;
                            if ratio < tp.mu_lo {
                                lo = mid;
                            } else if ratio > tp.mu_hi {
                                hi = mid;
                                best = n;
                            } else {
                                return n.min(st.nu);
                            }
                        }
                    }
                }
                best
            }
        }
    } else {
        match shifted_step(h, g, tp.gamma_lambda * lambda, tp.gamma_lambda) {
            None => fallback,
            Some((_, norm)) if norm >= tp.gamma_c * s_norm => norm,
            Some((_, norm)) => tp.gamma_c * norm,
        }
    };
    radius.min(st.nu).max(f64::MIN_POSITIVE)
}
