//! The discretized Landau-Brazovskii free energy
//!
//! ```text
//! E(u) = 1/2 sum_k (1 - |Bk|^2)^2 |u_k|^2
//!      + (1/N) sum_x [ tau/2 psi^2 - gamma/6 psi^3 + psi^4/24 ],   psi = inverse(u)
//! ```
//!
//! together with its gradient and the Hessian `H = D + T`, where `D` is the
//! interaction symbol (diagonal in reciprocal space) and `T` is the bulk
//! curvature `tau - gamma psi + psi^2/2` (diagonal in physical space). The
//! mean mode is projected out of every gradient and Hessian product.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{self, PhysicalField, SpectralField};
use crate::grid::Grid;
use crate::operator::SplitHessian;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Reduced temperature.
    pub tau: f64,
    /// Coefficient of the cubic term.
    pub gamma: f64,
}

impl ModelParams {
    pub fn new(tau: f64, gamma: f64) -> Result<Self> {
        if !tau.is_finite() || !gamma.is_finite() {
            return Err(Error::Config(format!("model parameters must be finite (tau={tau}, gamma={gamma})")));
        }
        Ok(Self { tau, gamma })
    }

    /// Bulk density `f(psi)`.
    pub fn bulk(&self, psi: f64) -> f64 {
        let p2 = psi * psi;
        p2 * (0.5 * self.tau - self.gamma / 6.0 * psi + p2 / 24.0)
    }

    /// `f'(psi)`.
    pub fn bulk_d1(&self, psi: f64) -> f64 {
        psi * (self.tau - 0.5 * self.gamma * psi + psi * psi / 6.0)
    }

    /// `f''(psi)`.
    pub fn bulk_d2(&self, psi: f64) -> f64 {
        self.tau - self.gamma * psi + 0.5 * psi * psi
    }
}

fn check_pinned(u: &SpectralField) -> Result<()> {
    let c0 = u.coeffs()[0].norm();
    if c0 != 0.0 {
        return Err(Error::MeanNotPinned(c0));
    }
    Ok(())
}

fn interaction_energy(u: &SpectralField) -> f64 {
    let sym = u.grid().laplacian_symbol();
    0.5 * u.coeffs().iter().zip(sym).map(|(c, s)| s * c.norm_sqr()).sum::<f64>()
}

/// Free energy of a mean-pinned Hermitian field.
pub fn energy(u: &SpectralField, p: &ModelParams) -> Result<f64> {
    check_pinned(u)?;
    let psi = field::inverse(u)?;
    let n = psi.values().len() as f64;
    let bulk: f64 = psi.values().iter().map(|&v| p.bulk(v)).sum::<f64>() / n;
    Ok(interaction_energy(u) + bulk)
}

/// Gradient with respect to the real inner product `dot`, mean mode removed.
pub fn gradient(u: &SpectralField, p: &ModelParams) -> Result<SpectralField> {
    check_pinned(u)?;
    let psi = field::inverse(u)?;
    Ok(gradient_from_physical(u, &psi, p))
}

/// Energy and gradient from a single inverse transform.
pub fn energy_and_gradient(u: &SpectralField, p: &ModelParams) -> Result<(f64, SpectralField)> {
    check_pinned(u)?;
    let psi = field::inverse(u)?;
    let n = psi.values().len() as f64;
    let bulk: f64 = psi.values().iter().map(|&v| p.bulk(v)).sum::<f64>() / n;
    let g = gradient_from_physical(u, &psi, p);
    Ok((interaction_energy(u) + bulk, g))
}

fn gradient_from_physical(u: &SpectralField, psi: &PhysicalField, p: &ModelParams) -> SpectralField {
    let grid = u.grid().clone();
    let d1: Vec<f64> = psi.values().iter().map(|&v| p.bulk_d1(v)).collect();
    let mut buf = vec![Complex64::default(); grid.len()];
    field::forward_real(&grid, &d1, &mut buf);
    for ((b, c), s) in buf.iter_mut().zip(u.coeffs()).zip(grid.laplacian_symbol()) {
        *b += c * s;
    }
    let mut g = SpectralField::from_coeffs(grid, buf).expect("finite gradient");
    g.pin_mean();
    g
}

/// `E(u + s) - E(u)` evaluated through the exact polynomial expansion of the
/// bulk density, which avoids cancelling two nearly equal energies when the
/// step is small.
pub fn energy_change(u: &SpectralField, s: &SpectralField, p: &ModelParams) -> Result<f64> {
    check_pinned(u)?;
    check_pinned(s)?;
    if !u.grid().same_as(s.grid()) {
        return Err(Error::GridMismatch);
    }
    let sym = u.grid().laplacian_symbol();
    let d_interaction: f64 = u
        .coeffs()
        .iter()
        .zip(s.coeffs())
        .zip(sym)
        .map(|((a, b), l)| l * ((a * b.conj()).re + 0.5 * b.norm_sqr()))
        .sum();
    let psi = field::inverse(u)?;
    let delta = field::inverse(s)?;
    let n = psi.values().len() as f64;
    let d_bulk: f64 = psi
        .values()
        .iter()
        .zip(delta.values())
        .map(|(&x, &h)| {
            let d1 = p.bulk_d1(x);
            let d2 = p.bulk_d2(x);
            let d3 = x - p.gamma;
            h * (d1 + h * (0.5 * d2 + h * (d3 / 6.0 + h / 24.0)))
        })
        .sum::<f64>()
        / n;
    Ok(d_interaction + d_bulk)
}

/// Matrix-free Hessian `D + T` at a linearization point.
#[derive(Debug, Clone)]
pub struct HessianOperator {
    grid: Arc<Grid>,
    tau: f64,
    gamma_prime: PhysicalField,
    gamma_prime_mean: f64,
}

/// Builds the Hessian at `u`.
pub fn hessian_at(u: &SpectralField, p: &ModelParams) -> Result<HessianOperator> {
    check_pinned(u)?;
    let psi = field::inverse(u)?;
    let values: Vec<f64> = psi.values().iter().map(|&v| p.bulk_d2(v)).collect();
    let gamma_prime_mean = values.iter().sum::<f64>() / values.len() as f64;
    let gamma_prime = PhysicalField::new(u.grid().clone(), values)?;
    Ok(HessianOperator { grid: u.grid().clone(), tau: p.tau, gamma_prime, gamma_prime_mean })
}

impl HessianOperator {
    /// Builds an operator from an explicit bulk-curvature field.
    pub fn from_bulk_curvature(gamma_prime: PhysicalField, tau: f64) -> Self {
        let gamma_prime_mean = gamma_prime.mean();
        Self { grid: gamma_prime.grid().clone(), tau, gamma_prime, gamma_prime_mean }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// The interaction diagonal `D`.
    pub fn symbol(&self) -> &[f64] {
        self.grid.laplacian_symbol()
    }

    /// The bulk curvature `tau - gamma psi + psi^2/2` on the grid.
    pub fn gamma_prime(&self) -> &PhysicalField {
        &self.gamma_prime
    }

    /// `H v`, mean mode removed.
    pub fn apply(&self, v: &SpectralField) -> Result<SpectralField> {
        if !self.grid.same_as(v.grid()) {
            return Err(Error::GridMismatch);
        }
        let mut out = SpectralField::zeros(self.grid.clone());
        crate::operator::LinearOperator::apply(self, v.as_real(), out.as_real_mut());
        Ok(out)
    }

    /// `T v` alone, mean mode removed.
    pub fn apply_bulk(&self, v: &SpectralField) -> Result<SpectralField> {
        if !self.grid.same_as(v.grid()) {
            return Err(Error::GridMismatch);
        }
        let mut out = SpectralField::zeros(self.grid.clone());
        self.apply_explicit(v.as_real(), out.as_real_mut());
        Ok(out)
    }

    /// Upper bound `max_x |gamma'(x)|` on the operator norm of `T`.
    pub fn t_norm_bound(&self) -> f64 {
        self.gamma_prime.max_abs()
    }
}

pub fn apply_hessian(h: &HessianOperator, v: &SpectralField) -> Result<SpectralField> {
    h.apply(v)
}

pub fn t_norm_bound(h: &HessianOperator) -> f64 {
    h.t_norm_bound()
}

impl SplitHessian for HessianOperator {
    fn dim(&self) -> usize {
        2 * self.grid.len()
    }

    fn implicit_diagonal(&self) -> &[f64] {
        self.grid.laplacian_symbol_interleaved()
    }

    fn apply_explicit(&self, x: &[f64], y: &mut [f64]) {
        let xc: &[Complex64] = bytemuck::cast_slice(x);
        let yc: &mut [Complex64] = bytemuck::cast_slice_mut(y);
        let mut psi = vec![0.0; self.grid.len()];
        self.grid.fft().inverse_real(xc, &mut psi);
        for (v, g) in psi.iter_mut().zip(self.gamma_prime.values()) {
            *v *= g;
        }
        field::forward_real(&self.grid, &psi, yc);
        yc[0] = Complex64::default();
    }

    fn explicit_diagonal(&self) -> Vec<f64> {
        let mut diag = vec![self.gamma_prime_mean; 2 * self.grid.len()];
        diag[0] = 0.0;
        diag[1] = 0.0;
        diag
    }

    fn project(&self, x: &mut [f64]) {
        field::symmetrize_interleaved(&self.grid, x);
        x[0] = 0.0;
        x[1] = 0.0;
    }
}
