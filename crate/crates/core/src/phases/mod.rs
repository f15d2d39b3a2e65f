//! Initial ordered configurations and `(tau, gamma)` sweeps.
//!
//! Seeds are given as sets of integer wavevectors `k` with coefficients, for
//! a cubic cell with reciprocal matrix `B = b I`. Only one member of each
//! `{k, -k}` pair is listed; the partner gets the conjugate coefficient.
//!
//! | seed | `b` | modes |
//! |------|-----|-------|
//! | LAM | `1/sqrt 2` | `(1,0,0)` |
//! | HEX | `1/sqrt 6` | `(0,1,-1)`, `(1,0,-1)`, `(1,-1,0)` |
//! | BCC | `1/sqrt 2` | the six `<110>` pairs |
//! | DG | `1/sqrt 6` | the `{211}` family with the gyroid phases |
//! | FDDD | `1/sqrt 6` | see [`fddd_modes`] |
//! | RANDOM | grid's own | Gaussian on `0.8 <= |Bk| <= 1.2` |

mod sweep;

pub use sweep::{sweep, write_sweep_csv, Candidate, CandidateResult, SweepCell, SweepSpec, SWEEP_HEADER};

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use log::warn;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;

/// Coefficient magnitude of the tabulated seeds.
pub const DEFAULT_AMPLITUDE: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SeedName {
    Lam,
    Hex,
    Bcc,
    Dg,
    Fddd,
    Random,
}

impl SeedName {
    pub const ALL: [SeedName; 6] =
        [SeedName::Lam, SeedName::Hex, SeedName::Bcc, SeedName::Dg, SeedName::Fddd, SeedName::Random];

    pub fn as_str(self) -> &'static str {
        match self {
            SeedName::Lam => "LAM",
            SeedName::Hex => "HEX",
            SeedName::Bcc => "BCC",
            SeedName::Dg => "DG",
            SeedName::Fddd => "FDDD",
            SeedName::Random => "RANDOM",
        }
    }
}

impl fmt::Display for SeedName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SeedName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SeedName::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownSeed(s.to_string()))
    }
}

/// A seed as a list of modes on a cubic cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSeed {
    pub name: SeedName,
    /// One representative of each `{k, -k}` pair.
    pub modes: Vec<([i64; 3], Complex64)>,
    /// Diagonal entry of `B`; the cell edge is `2 pi / b`.
    pub b: f64,
    pub amplitude: f64,
}

fn real_modes(ks: &[[i64; 3]], amplitude: f64) -> Vec<([i64; 3], Complex64)> {
    ks.iter().map(|k| (*k, Complex64::new(amplitude, 0.0))).collect()
}

/// The `{211}` modes of `sin 2X cos Y sin Z + sin 2Y cos Z sin X + sin 2Z cos X sin Y`,
/// each with coefficient magnitude one.
fn gyroid_modes() -> Vec<([i64; 3], Complex64)> {
    let mut out = Vec::new();
    // sin(a) = (e^{ia} - e^{-ia}) / 2i, cos(a) = (e^{ia} + e^{-ia}) / 2
    for rot in 0..3 {
        for s1 in [1i64, -1] {
            for s2 in [1i64, -1] {
                for s3 in [1i64, -1] {
                    let mut k = [0i64; 3];
                    k[rot] = 2 * s1;
                    k[(rot + 1) % 3] = s2;
                    k[(rot + 2) % 3] = s3;
                    // factor of the sin(2X) cos(Y) sin(Z) term: (s1/2i)(1/2)(s3/2i) = -s1 s3 / 8
                    let c = -(s1 * s3) as f64 / 8.0;
                    if is_representative(&k) {
                        out.push((k, Complex64::new(c, 0.0)));
                    }
                }
            }
        }
    }
    let scale = 1.0 / out.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
    out.into_iter().map(|(k, c)| (k, c * scale)).collect()
}

fn is_representative(k: &[i64; 3]) -> bool {
    k.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0)
}

/// Mode set of the orthorhombic network seed on the `2 sqrt(6) pi` cubic cell:
/// the gyroid's `{211}` modes restricted to the two triads orthogonal to
/// `(1,1,1)` and `(1,1,-1)`.
pub fn fddd_modes() -> Vec<([i64; 3], Complex64)> {
    FDDD_MODES.iter().map(|(k, re, im)| (*k, Complex64::new(*re, *im))).collect()
}

// Normalized so the largest coefficient has magnitude one.
const FDDD_MODES: &[([i64; 3], f64, f64)] = &[
    ([2, -1, 1], -1.0, 0.0),
    ([2, -1, -1], 1.0, 0.0),
    ([1, -2, 1], 1.0, 0.0),
    ([1, -2, -1], 1.0, 0.0),
    ([1, 1, 2], -1.0, 0.0),
    ([1, 1, -2], 1.0, 0.0),
];

impl PhaseSeed {
    /// The tabulated seed with every listed coefficient scaled to `amplitude`.
    pub fn standard(name: SeedName, amplitude: f64) -> Self {
        let s2 = 1.0 / 2f64.sqrt();
        let s6 = 1.0 / 6f64.sqrt();
        let (modes, b) = match name {
            SeedName::Lam => (real_modes(&[[1, 0, 0]], amplitude), s2),
            SeedName::Hex => (real_modes(&[[0, 1, -1], [1, 0, -1], [1, -1, 0]], amplitude), s6),
            SeedName::Bcc => (
                real_modes(&[[1, 1, 0], [1, -1, 0], [1, 0, 1], [1, 0, -1], [0, 1, 1], [0, 1, -1]], amplitude),
                s2,
            ),
            SeedName::Dg => (gyroid_modes().into_iter().map(|(k, c)| (k, c * amplitude)).collect(), s6),
            SeedName::Fddd => (fddd_modes().into_iter().map(|(k, c)| (k, c * amplitude)).collect(), s6),
            SeedName::Random => (Vec::new(), 1.0),
        };
        Self { name, modes, b, amplitude }
    }

    /// Edge length of the cubic cell the seed is tabulated for.
    pub fn box_length(&self) -> f64 {
        2.0 * PI / self.b
    }

    /// The seed's own cubic grid at resolution `m`.
    pub fn natural_grid(&self, m: usize) -> Result<Grid> {
        Grid::cubic(m, 3, self.box_length())
    }

    /// Places the seed on `grid`; `rng_seed` only matters for RANDOM.
    pub fn to_field(&self, grid: &Arc<Grid>, rng_seed: u64) -> Result<SpectralField> {
        if self.name == SeedName::Random {
            return random_seed(grid, self.amplitude, rng_seed);
        }
        if grid.dim() != 3 {
            return Err(Error::Config(format!("{} seed needs a 3-D grid", self.name)));
        }
        let expected = nalgebra::DMatrix::<f64>::identity(3, 3) * self.b;
        if (grid.reciprocal() - &expected).amax() > 1e-12 {
            warn!("{} seed is tabulated for B = {:.6} I; placing its modes on a different lattice", self.name, self.b);
        }
        let half = (grid.m() / 2) as i64;
        let mut u = SpectralField::zeros(grid.clone());
        for (k, c) in &self.modes {
            if k.iter().any(|v| v.abs() >= half) {
                return Err(Error::Config(format!(
                    "{} seed mode {:?} is not resolved at M = {}",
                    self.name,
                    k,
                    grid.m()
                )));
            }
            u.set_mode(k, *c);
        }
        u.pin_mean();
        Ok(u)
    }
}

fn random_seed(grid: &Arc<Grid>, amplitude: f64, rng_seed: u64) -> Result<SpectralField> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut u = SpectralField::zeros(grid.clone());
    let ksq = grid.wavenumber_sq();
    let conj = grid.conjugate_indices();
    {
        let c = u.coeffs_mut();
        for idx in 1..grid.len() {
            let j = conj[idx];
            if j < idx || !(0.64..=1.44).contains(&ksq[idx]) {
                continue;
            }
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            if j == idx {
                c[idx] = Complex64::new(re, 0.0);
            } else {
                c[idx] = Complex64::new(re, im);
                c[j] = c[idx].conj();
            }
        }
    }
    let peak = u.max_abs();
    let scale = if peak > 0.0 { amplitude / peak } else { 0.0 };
    let mut u = u.scaled(scale);
    u.pin_mean();
    Ok(u)
}

/// Seed `name` on `grid` with coefficient magnitude `amplitude`.
pub fn seed(name: SeedName, grid: &Arc<Grid>, amplitude: f64, rng_seed: u64) -> Result<SpectralField> {
    PhaseSeed::standard(name, amplitude).to_field(grid, rng_seed)
}
