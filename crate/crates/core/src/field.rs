//! Physical and spectral representations of the order parameter.
//!
//! Spectral coefficients follow `u_k = (1/N) sum_x f(x) exp(-i (Bk).x)`, so the
//! inverse transform is a plain sum. A spectral field of a real function is
//! Hermitian-symmetric; the optimization variable is such a field with the
//! `k = 0` coefficient pinned to zero, and the real inner product
//! `dot(u, v) = sum_k Re(u_k conj(v_k))`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Largest imaginary residue tolerated when returning to physical space.
pub const INVERSE_RESIDUE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct PhysicalField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl PhysicalField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        Self { grid, values: vec![0.0; n] }
    }

    /// Samples `f` at every grid point `A (i/M)`.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Arc<Grid>,
    coeffs: Vec<Complex64>,
    mean_pinned: bool,
}

impl SpectralField {
    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        Self { grid, coeffs: vec![Complex64::default(); n], mean_pinned: true }
    }

    pub fn from_coeffs(grid: Arc<Grid>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: coeffs.len() });
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mean_pinned = coeffs[0] == Complex64::default();
        Ok(Self { grid, coeffs, mean_pinned })
    }

    /// Builds a field from its interleaved `(re, im)` representation.
    pub fn from_real_parts(grid: Arc<Grid>, parts: &[f64]) -> Result<Self> {
        if parts.len() != 2 * grid.len() {
            return Err(Error::LengthMismatch { expected: 2 * grid.len(), got: parts.len() });
        }
        let coeffs = bytemuck::cast_slice::<f64, Complex64>(parts).to_vec();
        Self::from_coeffs(grid, coeffs)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficients viewed as `2N` interleaved reals. The Euclidean inner
    /// product of this view equals [`dot`](Self::dot).
    pub fn as_real(&self) -> &[f64] {
        bytemuck::cast_slice(&self.coeffs)
    }

    pub fn as_real_mut(&mut self) -> &mut [f64] {
        bytemuck::cast_slice_mut(&mut self.coeffs)
    }

    pub fn is_mean_pinned(&self) -> bool {
        self.mean_pinned
    }

    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        self.coeffs[self.grid.index_of(k)]
    }

    /// Sets the coefficient at `k` and its conjugate partner at `-k`.
    pub fn set_mode(&mut self, k: &[i64], value: Complex64) {
        let idx = self.grid.index_of(k);
        let cidx = self.grid.conjugate_index(idx);
        if idx == cidx {
            self.coeffs[idx] = Complex64::new(value.re, 0.0);
        } else {
            self.coeffs[idx] = value;
            self.coeffs[cidx] = value.conj();
        }
        if idx == 0 {
            self.mean_pinned = false;
        }
    }

    /// Zeroes the `k = 0` coefficient; every other coefficient is unchanged.
    pub fn project_mean_zero(mut self) -> Self {
        self.pin_mean();
        self
    }

    pub fn pin_mean(&mut self) {
        self.coeffs[0] = Complex64::default();
        self.mean_pinned = true;
    }

    /// `max_k |u_k - conj(u_{-k})|`.
    pub fn hermitian_residue(&self) -> f64 {
        let conj = self.grid.conjugate_indices();
        self.coeffs
            .iter()
            .zip(conj)
            .map(|(c, &j)| (c - self.coeffs[j].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Replaces every coefficient by the average of itself and its conjugate
    /// partner, removing rounding drift out of the real-field subspace.
    pub fn symmetrize(&mut self) {
        let grid = self.grid.clone();
        symmetrize_interleaved(&grid, self.as_real_mut());
    }

    fn check_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn dot(&self, other: &SpectralField) -> Result<f64> {
        self.check_grid(other)?;
        Ok(dot_real(self.as_real(), other.as_real()))
    }

    pub fn norm(&self) -> f64 {
        dot_real(self.as_real(), self.as_real()).sqrt()
    }

    /// `max_k |u_k|`.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `self += alpha * x`.
    pub fn axpy(&mut self, alpha: f64, x: &SpectralField) -> Result<()> {
        self.check_grid(x)?;
        for (a, b) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *a += b * alpha;
        }
        self.mean_pinned = self.mean_pinned && x.mean_pinned;
        Ok(())
    }

    pub fn scaled(mut self, alpha: f64) -> Self {
        for c in &mut self.coeffs {
            *c *= alpha;
        }
        self
    }

    /// Returns to physical space, verifying the imaginary residue.
    pub fn to_physical(&self) -> Result<PhysicalField> {
        inverse(self)
    }
}

/// `(1/N) sum_x f(x) exp(-i (Bk).x)` for every `k`.
pub fn forward(f: &PhysicalField) -> SpectralField {
    let grid = f.grid.clone();
    let mut coeffs = vec![Complex64::default(); grid.len()];
    forward_real(&grid, &f.values, &mut coeffs);
    let mean_pinned = coeffs[0] == Complex64::default();
    SpectralField { grid, coeffs, mean_pinned }
}

/// `f(x) = sum_k u_k exp(i (Bk).x)`; fails if the result is not real.
pub fn inverse(u: &SpectralField) -> Result<PhysicalField> {
    let residue = u.hermitian_residue();
    if residue > INVERSE_RESIDUE_TOL {
        return Err(Error::NonHermitian(residue));
    }
    let mut values = vec![0.0; u.grid.len()];
    u.grid.fft().inverse_real(&u.coeffs, &mut values);
    Ok(PhysicalField { grid: u.grid.clone(), values })
}

pub fn project_mean_zero(u: SpectralField) -> SpectralField {
    u.project_mean_zero()
}

pub fn dot(u: &SpectralField, v: &SpectralField) -> Result<f64> {
    u.dot(v)
}

/// Forward transform of real data including the `1/N` factor.
pub(crate) fn forward_real(grid: &Grid, values: &[f64], out: &mut [Complex64]) {
    grid.fft().forward_real(values, out);
    let scale = 1.0 / grid.len() as f64;
    for c in out.iter_mut() {
        *c *= scale;
    }
}


pub(crate) fn dot_real(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn symmetrize_interleaved(grid: &Grid, x: &mut [f64]) {
    let coeffs: &mut [Complex64] = bytemuck::cast_slice_mut(x);
    let conj = grid.conjugate_indices();
    for i in 0..coeffs.len() {
        let j = conj[i];
        if j < i {
            continue;
        }
        if j == i {
            coeffs[i].im = 0.0;
        } else {
            let avg = (coeffs[i] + coeffs[j].conj()) * 0.5;
            coeffs[i] = avg;
            coeffs[j] = avg.conj();
        }
    }
}
