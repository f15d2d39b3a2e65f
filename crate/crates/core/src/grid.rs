//! Periodic lattice geometry and the wavevector layout of spectral arrays.
//!
//! A grid covers the cell spanned by the columns of the Bravais matrix `A`
//! with `M` points per axis. Physical wavevectors are `B k` for integer `k`,
//! where `A B^T = 2 pi I`. Spectral arrays use the standard DFT order per axis
//! (`0, 1, .., M/2-1, -M/2, .., -1`) with axis 0 fastest, matching the layout
//! of physical values.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fft::FftPlan;

#[derive(Debug)]
pub struct Grid {
    m: usize,
    d: usize,
    n: usize,
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    kvec: Vec<i32>,
    conj: Vec<usize>,
    ksq: Vec<f64>,
    symbol: Vec<f64>,
    symbol_interleaved: Vec<f64>,
    fft: FftPlan,
}

impl Grid {
    /// Builds a grid from the resolution, the dimension and the row-major
    /// `d x d` reciprocal matrix `B`.
    pub fn new(m: usize, d: usize, b: &[f64]) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(Error::InvalidDimension(d));
        }
        if m < 4 || m % 2 != 0 {
            return Err(Error::InvalidResolution(m));
        }
        if b.len() != d * d {
            return Err(Error::LatticeShape { expected: d, got: b.len() });
        }
        let b = DMatrix::from_row_slice(d, d, b);
        let det = b.determinant();
        let scale = b.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())).max(f64::MIN_POSITIVE);
        if !det.is_finite() || det.abs() <= 1e-12 * scale.powi(d as i32) {
            return Err(Error::SingularLattice(det.abs()));
        }
        let b_inv = b.clone().try_inverse().ok_or(Error::SingularLattice(det.abs()))?;
        let a = b_inv.transpose() * (2.0 * PI);

        let n = m.pow(d as u32);
        let half = (m / 2) as i64;
        let mut kvec = Vec::with_capacity(n * d);
        let mut conj = Vec::with_capacity(n);
        let mut ksq = Vec::with_capacity(n);
        for idx in 0..n {
            let mut rem = idx;
            let mut k = [0i64; 3];
            let mut c = 0usize;
            let mut stride = 1usize;
            for ka in k.iter_mut().take(d) {
                let i = rem % m;
                rem /= m;
                *ka = if (i as i64) < half { i as i64 } else { i as i64 - m as i64 };
                kvec.push(*ka as i32);
                c += ((m - i) % m) * stride;
                stride *= m;
            }
            conj.push(c);
            let mut sq = 0.0;
            for row in 0..d {
                let q: f64 = (0..d).map(|col| b[(row, col)] * k[col] as f64).sum();
                sq += q * q;
            }
            // snap rounding noise so shell modes have an exactly zero symbol
            if (sq - 1.0).abs() < 1e-13 {
                sq = 1.0;
            }
            ksq.push(sq);
        }
        let symbol: Vec<f64> = ksq.iter().map(|s| (1.0 - s) * (1.0 - s)).collect();
        let symbol_interleaved = symbol.iter().flat_map(|&s| [s, s]).collect();
        Ok(Self {
            m,
            d,
            n,
            a,
            b,
            kvec,
            conj,
            ksq,
            symbol,
            symbol_interleaved,
            fft: FftPlan::new(m, d),
        })
    }

    /// Grid on the cubic cell `[0, L]^d`, i.e. `B = (2 pi / L) I`.
    pub fn cubic(m: usize, d: usize, box_len: f64) -> Result<Self> {
        let mut b = vec![0.0; d * d];
        for i in 0..d {
            b[i * d + i] = 2.0 * PI / box_len;
        }
        Self::new(m, d, &b)
    }

    pub fn shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Total number of grid points `N = M^d`.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bravais(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn reciprocal(&self) -> &DMatrix<f64> {
        &self.b
    }

    /// Integer wavevector of a flat spectral index.
    pub fn wavevector(&self, idx: usize) -> &[i32] {
        &self.kvec[idx * self.d..(idx + 1) * self.d]
    }

    /// Flat index of an integer wavevector, wrapped modulo `M`.
    pub fn index_of(&self, k: &[i64]) -> usize {
        assert_eq!(k.len(), self.d, "wavevector dimension mismatch");
        let m = self.m as i64;
        k.iter()
            .rev()
            .fold(0usize, |acc, &ka| acc * self.m + ka.rem_euclid(m) as usize)
    }

    /// Index of `-k` for the wavevector stored at `idx`.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        self.conj[idx]
    }

    pub fn conjugate_indices(&self) -> &[usize] {
        &self.conj
    }

    /// `|B k|^2` per flat index.
    pub fn wavenumber_sq(&self) -> &[f64] {
        &self.ksq
    }

    /// The interaction symbol `(1 - |Bk|^2)^2` per flat index.
    pub fn laplacian_symbol(&self) -> &[f64] {
        &self.symbol
    }

    /// The symbol repeated for the real and imaginary part of each coefficient.
    pub fn laplacian_symbol_interleaved(&self) -> &[f64] {
        &self.symbol_interleaved
    }

    /// Physical coordinates `A (i/M)` of a flat grid index.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        let frac: Vec<f64> = (0..self.d)
            .map(|a| ((idx / self.m.pow(a as u32)) % self.m) as f64 / self.m as f64)
            .collect();
        (0..self.d)
            .map(|row| (0..self.d).map(|col| self.a[(row, col)] * frac[col]).sum())
            .collect()
    }

    pub(crate) fn fft(&self) -> &FftPlan {
        &self.fft
    }

    /// Whether two grids describe the same discretization.
    pub fn same_as(&self, other: &Grid) -> bool {
        std::ptr::eq(self, other) || (self.m == other.m && self.d == other.d && self.b == other.b)
    }
}

/// Free-function form of [`laplacian_symbol`](Grid::laplacian_symbol).
pub fn laplacian_symbol(grid: &Grid) -> Vec<f64> {
    grid.symbol.clone()
}
