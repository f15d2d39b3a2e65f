//! Algebraically smallest Hessian eigenpairs and stationary-point classification.
//!
//! The Hessian spectrum spans `[tau, max Lambda]`, which at M = 32 is about
//! five orders of magnitude wide while the interesting eigenvalues cluster
//! near zero. A block Davidson iteration with the diagonal `D + mean(gamma')`
//! as preconditioner resolves the bottom of such a spectrum in a few dozen
//! matvec blocks.

use std::io::Write;

use log::debug;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::{dot_real, SpectralField};
use crate::model::{hessian_at, HessianOperator, ModelParams};
use crate::operator::LinearOperator;

pub const DEFAULT_NEG_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    #[serde(rename = "SP-II")]
    SecondOrder,
    #[serde(rename = "saddle")]
    Saddle,
    #[serde(rename = "non-stationary")]
    NonStationary,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::SecondOrder => "SP-II",
            Classification::Saddle => "saddle",
            Classification::NonStationary => "non-stationary",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigOptions {
    pub m: usize,
    /// Residual tolerance `|A x - sigma x|` for unit `x`.
    pub tol: f64,
    pub seed: u64,
    /// Number of extra vectors carried in the block beyond `m`.
    pub guard: usize,
    pub max_basis: usize,
    pub max_iter: usize,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self { m: 4, tol: 1e-8, seed: 0, guard: 2, max_basis: 48, max_iter: 1000 }
    }
}

/// Eigenpairs in the working basis of the operator.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub matvecs: usize,
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<Vec<SpectralField>>,
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub classification: Option<Classification>,
}

fn orthogonalize(basis: &[Vec<f64>], x: &mut [f64]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for b in basis {
            let c = dot_real(b, x);
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi -= c * bi;
            }
        }
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let n = dot_real(x, x).sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
    n
}

/// Block Davidson for the `opts.m` algebraically smallest eigenpairs of `a`.
///
/// Uses `a.diagonal()` as preconditioner when available and `a.project`
/// to stay in the admissible subspace.
pub fn davidson<A: LinearOperator + ?Sized>(a: &A, opts: &EigOptions) -> EigenPairs {
    let n = a.dim();
    let m = opts.m.min(n);
    let block = (m + opts.guard).min(n);
    let max_basis = opts.max_basis.max(3 * block).min(n);
    let diag = a.diagonal();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut v: Vec<Vec<f64>> = Vec::new();
    let mut av: Vec<Vec<f64>> = Vec::new();
    let mut matvecs = 0;
    let push = |x: Vec<f64>, v: &mut Vec<Vec<f64>>, av: &mut Vec<Vec<f64>>, matvecs: &mut usize| {
        let mut y = vec![0.0; n];
        a.apply(&x, &mut y);
        a.project(&mut y);
        *matvecs += 1;
        v.push(x);
        av.push(y);
    };
    let mut attempts = 0;
    while v.len() < block && attempts < 10 * block {
        attempts += 1;
        let mut x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        a.project(&mut x);
        orthogonalize(&v, &mut x);
        if normalize(&mut x) > 1e-8 {
            push(x, &mut v, &mut av, &mut matvecs);
        }
    }

    let mut values = vec![0.0; m];
    let mut vectors = vec![vec![0.0; n]; m];
    let mut residuals = vec![f64::INFINITY; m];
    for iter in 1..=opts.max_iter {
        let k = v.len();
        let g = DMatrix::from_fn(k, k, |i, j| 0.5 * (dot_real(&v[i], &av[j]) + dot_real(&v[j], &av[i])));
        let eig = SymmetricEigen::new(g);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
        let nb = block.min(k);

        let mut ritz = Vec::with_capacity(nb);
        let mut aritz = Vec::with_capacity(nb);
        let mut theta = Vec::with_capacity(nb);
        for &c in order.iter().take(nb) {
            let y = eig.eigenvectors.column(c);
            let mut x = vec![0.0; n];
            let mut ax = vec![0.0; n];
            for (j, yj) in y.iter().enumerate() {
                for i in 0..n {
                    x[i] += yj * v[j][i];
                    ax[i] += yj * av[j][i];
                }
            }
            ritz.push(x);
            aritz.push(ax);
            theta.push(eig.eigenvalues[c]);
        }
        let res: Vec<Vec<f64>> = (0..nb)
            .map(|i| aritz[i].iter().zip(&ritz[i]).map(|(ax, x)| ax - theta[i] * x).collect())
            .collect();
        let res_norm: Vec<f64> = res.iter().map(|r| dot_real(r, r).sqrt()).collect();
        for i in 0..m.min(nb) {
            values[i] = theta[i];
            vectors[i].clone_from(&ritz[i]);
            residuals[i] = res_norm[i];
        }
        let done = nb >= m && res_norm[..m].iter().all(|r| *r <= opts.tol);
        if done || k >= n {
            debug!("davidson converged={done} after {iter} iterations, {matvecs} matvecs");
            return EigenPairs { values, vectors, residuals, converged: done, iterations: iter, matvecs };
        }

        // thick restart onto the current Ritz block
        if k + nb > max_basis {
            v = ritz.clone();
            av = aritz.clone();
        }

        let mut added = 0;
        for i in 0..nb {
            if res_norm[i] <= opts.tol {
                continue;
            }
            let mut t = res[i].clone();
            if let Some(d) = &diag {
                // Olsen correction: t = M^-1 (r - eps x), with eps making t orthogonal to x
                let inv: Vec<f64> = d
                    .iter()
                    .map(|di| {
                        let den = di - theta[i];
                        1.0 / if den.abs() < 1e-10 { 1e-10f64.copysign(den) } else { den }
                    })
                    .collect();
                let x = &ritz[i];
                let (mut xr, mut xx) = (0.0, 0.0);
                for j in 0..n {
                    xr += x[j] * inv[j] * t[j];
                    xx += x[j] * inv[j] * x[j];
                }
                let eps = if xx.abs() > 0.0 { xr / xx } else { 0.0 };
                for j in 0..n {
                    t[j] = inv[j] * (t[j] - eps * x[j]);
                }
            }
            a.project(&mut t);
            orthogonalize(&v, &mut t);
            if normalize(&mut t) > 1e-10 {
                // a second pass keeps the basis orthonormal after tiny norms
                orthogonalize(&v, &mut t);
                normalize(&mut t);
                push(t, &mut v, &mut av, &mut matvecs);
                added += 1;
            }
        }
        if added == 0 {
            // stagnation: inject a fresh random direction
            let mut x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            a.project(&mut x);
            orthogonalize(&v, &mut x);
            if normalize(&mut x) > 1e-8 {
                push(x, &mut v, &mut av, &mut matvecs);
            } else {
                return EigenPairs { values, vectors, residuals, converged: false, iterations: iter, matvecs };
            }
        }
    }
    EigenPairs { values, vectors, residuals, converged: false, iterations: opts.max_iter, matvecs }
}

/// The `opts.m` smallest eigenpairs of the mean-pinned Hessian.
pub fn smallest_eigs(h: &HessianOperator, opts: &EigOptions) -> SpectrumReport {
    let pairs = davidson(h, opts);
    let vectors = pairs
        .vectors
        .iter()
        .map(|x| {
            let mut f = SpectralField::zeros(h.grid().clone());
            f.as_real_mut().copy_from_slice(x);
            f.pin_mean();
            f
        })
        .collect();
    SpectrumReport {
        eigenvalues: pairs.values,
        eigenvectors: Some(vectors),
        residuals: pairs.residuals,
        converged: pairs.converged,
        classification: None,
    }
}

/// Classifies a point from its gradient norm and smallest eigenvalue.
pub fn classify(report: &SpectrumReport, grad_inf: f64, eps: f64, neg_tol: f64) -> Classification {
    if grad_inf >= eps {
        Classification::NonStationary
    } else if report.eigenvalues.first().is_some_and(|s| *s >= -neg_tol) {
        Classification::SecondOrder
    } else {
        Classification::Saddle
    }
}

/// Spectrum and classification of `u`.
pub fn analyze(u: &SpectralField, p: &ModelParams, opts: &EigOptions, eps: f64) -> Result<SpectrumReport> {
    let (_, g) = crate::model::energy_and_gradient(u, p)?;
    let h = hessian_at(u, p)?;
    let mut report = smallest_eigs(&h, opts);
    report.classification = Some(classify(&report, g.max_abs(), eps, DEFAULT_NEG_TOL));
    Ok(report)
}

/// `dot(xi, g)` for the unit bottom eigenvector `xi` of `h`.
pub fn bottom_direction_overlap(h: &HessianOperator, g: &SpectralField, opts: &EigOptions) -> Result<f64> {
    let mut one = *opts;
    one.m = 1;
    let pairs = davidson(h, &one);
    if !pairs.converged {
        return Err(crate::Error::EigenNotConverged(format!(
            "bottom eigenpair residual {:e} after {} iterations",
            pairs.residuals[0], pairs.iterations
        )));
    }
    Ok(dot_real(&pairs.vectors[0], g.as_real()))
}

/// Writes rows `iter, sigma_1, ..., sigma_m`.
pub fn write_eigen_trace<W: Write>(mut out: W, rows: &[(usize, Vec<f64>)]) -> std::io::Result<()> {
    let m = rows.iter().map(|(_, v)| v.len()).max().unwrap_or(4);
    let header: Vec<String> = std::iter::once("iter".to_string()).chain((1..=m).map(|i| format!("sigma{i}"))).collect();
    writeln!(out, "{}", header.join(","))?;
    for (iter, vals) in rows {
        let cols: Vec<String> = vals.iter().map(|v| format!("{v:.12e}")).collect();
        writeln!(out, "{iter},{}", cols.join(","))?;
    }
    Ok(())
}
