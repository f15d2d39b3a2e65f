//! Preconditioned MINRES for shifted symmetric systems `(A + shift I) x = b`.
//!
//! The Lanczos tridiagonal built along the way doubles as a definiteness
//! probe: its LDL^T pivots are all positive while the shifted operator is
//! positive definite on the explored Krylov space.

use crate::error::{Error, Result};
use crate::field::{dot_real, SpectralField};
use crate::model::HessianOperator;
use crate::operator::LinearOperator;

/// Relative residual target of shifted solves.
pub const SHIFTED_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct MinresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// True residual `|b - (A + shift) x|`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct MinresOptions {
    pub rtol: f64,
    pub max_iter: usize,
    /// Fail as soon as a Lanczos pivot is non-positive.
    pub require_definite: bool,
}

fn true_residual<A: LinearOperator + ?Sized>(a: &A, shift: f64, x: &[f64], b: &[f64], work: &mut [f64]) -> f64 {
    a.apply(x, work);
    work.iter()
        .zip(x)
        .zip(b)
        .map(|((ax, xi), bi)| (bi - ax - shift * xi).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Solves `(A + shift I) x = b` with the diagonal preconditioner `M = diag(precond_inv)`.
pub fn minres<A: LinearOperator + ?Sized>(
    a: &A,
    shift: f64,
    b: &[f64],
    precond_inv: &[f64],
    opts: MinresOptions,
) -> Result<MinresOutcome> {
    let n = a.dim();
    assert_eq!(b.len(), n);
    assert_eq!(precond_inv.len(), n);
    let b_norm = dot_real(b, b).sqrt();
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(MinresOutcome { x, iterations: 0, residual: 0.0 });
    }
    let target = opts.rtol * b_norm;
    let too_small = |reason: &str| Error::ShiftTooSmall { shift, reason: reason.to_string() };

    let mut r1 = b.to_vec();
    let mut r2 = b.to_vec();
    let mut y: Vec<f64> = r1.iter().zip(precond_inv).map(|(r, m)| r * m).collect();
    let mut beta = dot_real(&r1, &y);
    if !(beta > 0.0) {
        return Err(too_small("preconditioner is not positive definite"));
    }
    beta = beta.sqrt();
    let mut oldb = 0.0;
    let mut dbar = 0.0;
    let mut epsln = 0.0;
    let mut phibar = beta;
    let mut cs = -1.0;
    let mut sn = 0.0;
    let mut w = vec![0.0; n];
    let mut w1 = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut work = vec![0.0; n];
    let mut pivot = f64::INFINITY;
    let mut last_beta = 0.0;
    let phibar0 = phibar;

    for itn in 1..=opts.max_iter {
        let s = 1.0 / beta;
        for i in 0..n {
            v[i] = s * y[i];
        }
        a.apply(&v, &mut y);
        for i in 0..n {
            y[i] += shift * v[i];
        }
        if itn >= 2 {
            let c = beta / oldb;
            for i in 0..n {
                y[i] -= c * r1[i];
            }
        }
        let alfa = dot_real(&v, &y);
        let c = alfa / beta;
        for i in 0..n {
            y[i] -= c * r2[i];
        }
        std::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&y);
        for i in 0..n {
            y[i] = r2[i] * precond_inv[i];
        }
        oldb = beta;
        beta = dot_real(&r2, &y);
        if beta < 0.0 {
            return Err(too_small("preconditioner is not positive definite"));
        }
        beta = beta.sqrt();

        // LDL^T pivot of the Lanczos tridiagonal
        pivot = if itn == 1 { alfa } else { alfa - last_beta * last_beta / pivot };
        last_beta = beta;
        if opts.require_definite && pivot <= 0.0 {
            return Err(too_small("shifted operator is indefinite"));
        }

        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        std::mem::swap(&mut w1, &mut w2);
        std::mem::swap(&mut w2, &mut w);
        let denom = 1.0 / gamma;
        for i in 0..n {
            w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) * denom;
            x[i] += phi * w[i];
        }

        // phibar tracks the residual in the preconditioned norm; confirm directly
        let lucky = beta <= f64::EPSILON * phibar0;
        if phibar <= opts.rtol * phibar0 || lucky || itn == opts.max_iter {
            let res = true_residual(a, shift, &x, b, &mut work);
            if res <= target {
                a.project(&mut x);
                return Ok(MinresOutcome { x, iterations: itn, residual: res });
            }
            if lucky {
                break;
            }
        }
    }
    Err(too_small("iteration budget exhausted"))
}

/// Iteration budget `10 sqrt(N)` used for shifted Hessian solves.
pub fn shifted_budget(grid_points: usize) -> usize {
    (10.0 * (grid_points as f64).sqrt()).ceil() as usize
}

/// Solves `(H + shift I) s = -g` for the LB Hessian.
///
/// Preconditioned by `1/(D + shift + |tau|)`. Fails with
/// [`Error::ShiftTooSmall`] when the shifted operator shows a non-positive
/// pivot or the budget runs out.
pub fn solve_shifted(h: &HessianOperator, shift: f64, g: &SpectralField) -> Result<SpectralField> {
    if !h.grid().same_as(g.grid()) {
        return Err(Error::GridMismatch);
    }
    let offset = shift + h.tau().abs();
    let precond: Vec<f64> = h
        .grid()
        .laplacian_symbol_interleaved()
        .iter()
        .map(|d| 1.0 / (d + offset).max(1e-12))
        .collect();
    let rhs: Vec<f64> = g.as_real().iter().map(|v| -v).collect();
    let opts = MinresOptions {
        rtol: SHIFTED_RTOL,
        max_iter: shifted_budget(h.grid().len()),
        require_definite: true,
    };
    let out = minres(h, shift, &rhs, &precond, opts)?;
    let mut s = SpectralField::zeros(h.grid().clone());
    s.as_real_mut().copy_from_slice(&out.x);
    Ok(s)
}
