//! Trust-region subproblem `min_{|d| <= r} g.d + 1/2 d.(D + T) d`.
//!
//! The solver runs the adaptive implicit-explicit iteration
//!
//! ```text
//! b_k     = d_k - eta (g + T d_k)
//! d_{k+1} = b_k / (1 + eta (D + lambda_{k+1}))
//! ```
//!
//! where `lambda_{k+1} >= 0` is the root of the secular equation
//! `phi_k(lambda) = |d_{k+1}(lambda)|^2 = r^2` whenever the unconstrained
//! update would leave the ball. Starting from `d_0 = -r g/|g|` the iteration
//! converges to the global minimizer as long as `g` has a component along
//! the bottom eigenvector of `D + T`.

mod oracle;

pub use oracle::dense_oracle;

use log::trace;
use serde::{Deserialize, Serialize};

use crate::field::dot_real;
use crate::operator::SplitHessian;

/// Step size reported as the empirical default.
pub const DEFAULT_ETA: f64 = 0.1;
pub const DEFAULT_EPS_SUB: f64 = 1e-13;
pub const DEFAULT_MAX_OUTER: usize = 5000;
/// Relative tolerance on `|phi(lambda) - r^2|`.
pub const SECULAR_RTOL: f64 = 1e-12;
const MAX_NEWTON_STEPS: usize = 100;
const MAX_BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EtaMode {
    /// Always `eta = 0.1`.
    #[default]
    Fixed,
    /// `min(0.1, 1/(|T| + 2a))`, which guarantees monotone descent.
    Safeguarded,
}

/// Step size for the inner iteration given a bound on `|T|`.
pub fn default_eta(t_norm_bound: f64, mode: EtaMode, a: f64) -> f64 {
    match mode {
        EtaMode::Fixed => DEFAULT_ETA,
        EtaMode::Safeguarded => DEFAULT_ETA.min(1.0 / (t_norm_bound + 2.0 * a)),
    }
}

/// `phi(lambda) = sum_i b_i^2 / (1 + eta (D_i + lambda))^2` and its derivative.
///
/// Entries of `b` belonging to the pinned mean mode are zero, so summing
/// over every entry is the same as summing over mean-excluded modes.
pub fn phi(lambda: f64, b: &[f64], diag: &[f64], eta: f64) -> (f64, f64) {
    let mut value = 0.0;
    let mut deriv = 0.0;
    for (bi, di) in b.iter().zip(diag) {
        let inv = 1.0 / (1.0 + eta * (di + lambda));
        let t = bi * bi * inv * inv;
        value += t;
        deriv += t * inv;
    }
    (value, -2.0 * eta * deriv)
}

/// Outcome of the secular solve, with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularRoot {
    pub lambda: f64,
    pub newton_steps: usize,
    pub bisected: bool,
}

/// Multiplier making the implicit update land on the sphere of radius `r`,
/// or zero when the unconstrained update is already inside.
pub fn solve_radius_multiplier(b: &[f64], diag: &[f64], eta: f64, r: f64) -> f64 {
    solve_radius_multiplier_traced(b, diag, eta, r, |_| {}).lambda
}

/// As [`solve_radius_multiplier`], reporting every Newton iterate.
///
/// `phi - r^2` is convex and decreasing, so Newton from `lambda = 0` climbs
/// monotonically towards the root. The iterates are kept inside the bracket
/// `[0, (|b|/r - 1)/eta]`; bisection takes over if Newton stalls.
pub fn solve_radius_multiplier_traced(
    b: &[f64],
    diag: &[f64],
    eta: f64,
    r: f64,
    on_iterate: impl FnMut(f64),
) -> SecularRoot {
    secular_newton(b, diag, eta, r, 0.0, on_iterate)
}

/// Newton from `start` when `phi(start) > r^2`, otherwise from zero.
///
/// Any start left of the root keeps the iterates monotone, so a previous
/// multiplier is a safe warm start.
fn secular_newton(
    b: &[f64],
    diag: &[f64],
    eta: f64,
    r: f64,
    start: f64,
    mut on_iterate: impl FnMut(f64),
) -> SecularRoot {
    let r2 = r * r;
    let tol = SECULAR_RTOL * r2;
    let mut lambda = 0.0;
    let (mut value, mut deriv) = if start > 0.0 {
        let at_start = phi(start, b, diag, eta);
        if at_start.0 > r2 {
            lambda = start;
            at_start
        } else if (at_start.0 - r2).abs() <= tol {
            on_iterate(start);
            return SecularRoot { lambda: start, newton_steps: 0, bisected: false };
        } else {
            phi(0.0, b, diag, eta)
        }
    } else {
        phi(0.0, b, diag, eta)
    };
    if lambda == 0.0 && value <= r2 {
        return SecularRoot { lambda: 0.0, newton_steps: 0, bisected: false };
    }
    let b_norm = dot_real(b, b).sqrt();
    let upper = ((b_norm / r - 1.0) / eta).max(0.0);
    on_iterate(lambda);
    for step in 1..=MAX_NEWTON_STEPS {
        let next = lambda - (value - r2) / deriv;
        if !(next > lambda) || next > upper {
            break;
        }
        lambda = next;
        on_iterate(lambda);
        (value, deriv) = phi(lambda, b, diag, eta);
        if (value - r2).abs() <= tol {
            return SecularRoot { lambda, newton_steps: step, bisected: false };
        }
        if value < r2 {
            // rounding pushed us past the root; polish by bisection below
            break;
        }
    }

    let (mut lo, mut hi) = if value > r2 { (lambda, upper.max(lambda)) } else { (0.0, lambda) };
    let mut mid = lambda;
    for _ in 0..MAX_BISECTION_STEPS {
        mid = 0.5 * (lo + hi);
        let (v, _) = phi(mid, b, diag, eta);
        if (v - r2).abs() <= tol || hi - lo <= f64::EPSILON * hi {
            break;
        }
        if v > r2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    SecularRoot { lambda: mid, newton_steps: MAX_NEWTON_STEPS, bisected: true }
}

/// Settings of the inner solver as carried by the outer loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubproblemOptions {
    pub eta_mode: EtaMode,
    /// Descent constant `a` of the safeguarded step size.
    pub descent_a: f64,
    pub eps_sub: f64,
    pub max_outer: usize,
}

impl Default for SubproblemOptions {
    fn default() -> Self {
        Self {
            eta_mode: EtaMode::Fixed,
            descent_a: 1.0,
            eps_sub: DEFAULT_EPS_SUB,
            max_outer: DEFAULT_MAX_OUTER,
        }
    }
}

/// One subproblem instance.
#[derive(Debug, Clone, Copy)]
pub struct SubproblemSpec<'a, H: SplitHessian + ?Sized> {
    pub g: &'a [f64],
    pub hessian: &'a H,
    pub radius: f64,
    pub eta: f64,
    pub eps_sub: f64,
    pub max_outer: usize,
    /// When set, every iteration checks `f(d_k) - f(d_{k+1}) >= a |d_{k+1} - d_k|^2`.
    pub descent_a: Option<f64>,
    /// Added to the starting point `-r g/|g|`, which is then pulled back into the ball.
    pub start_perturbation: Option<&'a [f64]>,
    /// Bottom eigenvector, for checking the sign invariant `d^(1) g^(1) <= 0`.
    pub bottom_direction: Option<&'a [f64]>,
}

impl<'a, H: SplitHessian + ?Sized> SubproblemSpec<'a, H> {
    pub fn new(g: &'a [f64], hessian: &'a H, radius: f64, eta: f64) -> Self {
        Self {
            g,
            hessian,
            radius,
            eta,
            eps_sub: DEFAULT_EPS_SUB,
            max_outer: DEFAULT_MAX_OUTER,
            descent_a: None,
            start_perturbation: None,
            bottom_direction: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemResult {
    pub d: Vec<f64>,
    pub lambda: f64,
    /// `|g + (H + lambda I) d|`.
    pub kkt_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Model value `g.d + 1/2 d.H d`.
    pub model_value: f64,
    pub descent_violations: usize,
    pub sign_violations: usize,
}

/// `g.x + 1/2 x.H x` from a precomputed `T x`.
pub fn model_value(g: &[f64], diag: &[f64], x: &[f64], tx: &[f64]) -> f64 {
    let mut lin = 0.0;
    let mut quad = 0.0;
    for i in 0..x.len() {
        lin += g[i] * x[i];
        quad += x[i] * (diag[i] * x[i] + tx[i]);
    }
    lin + 0.5 * quad
}

fn kkt_residual(g: &[f64], diag: &[f64], lambda: f64, x: &[f64], tx: &[f64]) -> f64 {
    g.iter()
        .zip(diag)
        .zip(x)
        .zip(tx)
        .map(|(((gi, di), xi), ti)| {
            let r = gi + (di + lambda) * xi + ti;
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

/// Runs the adaptive implicit-explicit iteration.
pub fn solve<H: SplitHessian + ?Sized>(spec: &SubproblemSpec<'_, H>) -> SubproblemResult {
    let h = spec.hessian;
    let n = h.dim();
    let g = spec.g;
    let diag = h.implicit_diagonal();
    let r = spec.radius;
    let eta = spec.eta;
    assert!(r > 0.0 && eta > 0.0, "radius and step size must be positive");
    assert_eq!(g.len(), n);

    let g_norm = dot_real(g, g).sqrt();
    if g_norm == 0.0 {
        return SubproblemResult {
            d: vec![0.0; n],
            lambda: 0.0,
            kkt_residual: 0.0,
            iterations: 0,
            converged: true,
            model_value: 0.0,
            descent_violations: 0,
            sign_violations: 0,
        };
    }

    let mut d: Vec<f64> = g.iter().map(|gi| -r * gi / g_norm).collect();
    if let Some(p) = spec.start_perturbation {
        for (di, pi) in d.iter_mut().zip(p) {
            *di += pi;
        }
        let norm = dot_real(&d, &d).sqrt();
        if norm > r {
            d.iter_mut().for_each(|v| *v *= r / norm);
        }
    }
    let g_bottom = spec.bottom_direction.map(|xi| dot_real(xi, g));

    let mut td = vec![0.0; n];
    h.apply_explicit(&d, &mut td);
    let mut f_prev = model_value(g, diag, &d, &td);
    let mut b = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut t_next = vec![0.0; n];

    let mut best_d = d.clone();
    let mut best_lambda = 0.0;
    let mut prev_lambda = 0.0;
    let mut best_res = f64::INFINITY;
    let mut best_f = f_prev;
    let mut descent_violations = 0;
    let mut sign_violations = 0;

    for k in 0..spec.max_outer {
        for i in 0..n {
            b[i] = d[i] - eta * (g[i] + td[i]);
        }
        let lambda = secular_newton(&b, diag, eta, r, prev_lambda, |_| {}).lambda;
        prev_lambda = lambda;
        for i in 0..n {
            next[i] = b[i] / (1.0 + eta * (diag[i] + lambda));
        }
        h.apply_explicit(&next, &mut t_next);
        let res = kkt_residual(g, diag, lambda, &next, &t_next);
        let f_next = model_value(g, diag, &next, &t_next);

        if let Some(a) = spec.descent_a {
            let step2: f64 = next.iter().zip(&d).map(|(x, y)| (x - y) * (x - y)).sum();
            let slack = 1e-14 * (f_prev.abs() + f_next.abs() + 1e-300);
            if f_prev - f_next < a * step2 - slack {
                descent_violations += 1;
                trace!("descent violated at inner step {k}: {f_prev:e} -> {f_next:e}");
            }
        }
        if let (Some(xi), Some(g1)) = (spec.bottom_direction, g_bottom) {
            if dot_real(xi, &next) * g1 > 1e-12 {
                sign_violations += 1;
            }
        }

        std::mem::swap(&mut d, &mut next);
        std::mem::swap(&mut td, &mut t_next);
        f_prev = f_next;

        if res < best_res {
            best_res = res;
            best_lambda = lambda;
            best_d.copy_from_slice(&d);
            best_f = f_next;
        }
        if res < spec.eps_sub {
            return SubproblemResult {
                d,
                lambda,
                kkt_residual: res,
                iterations: k + 1,
                converged: true,
                model_value: f_next,
                descent_violations,
                sign_violations,
            };
        }
    }
    SubproblemResult {
        d: best_d,
        lambda: best_lambda,
        kkt_residual: best_res,
        iterations: spec.max_outer,
        converged: false,
        model_value: best_f,
        descent_violations,
        sign_violations,
    }
}
