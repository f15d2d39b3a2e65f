//! Second-order stationary points of Landau-Brazovskii free energies.
//!
//! The crate discretizes the energy with a Fourier pseudospectral method and
//! minimizes it with an implicit-explicit trust-region method whose
//! subproblem solver treats the interaction term implicitly in reciprocal
//! space and the bulk term explicitly in physical space. Every Hessian
//! product costs one FFT pair.
//!
//! Module map:
//!
//! - [`grid`], [`field`]: periodic lattices, transforms, the mean-zero constraint
//! - [`model`]: energy, gradient and the split Hessian `D + T`
//! - [`subproblem`]: trust-region subproblem solver and a dense oracle
//! - [`driver`]: the outer trust-region loop and its radius contraction
//! - [`krylov`]: preconditioned MINRES for shifted Hessian systems
//! - [`baselines`]: semi-implicit gradient-flow schemes for comparison
//! - [`spectrum`]: smallest Hessian eigenpairs and stationary-point classification
//! - [`phases`]: initial ordered configurations and parameter sweeps
//! - [`io`], [`config`], [`cli`]: artifacts, run configuration and command entry points

pub mod baselines;
pub mod cli;
pub mod config;
pub mod driver;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod io;
pub mod krylov;
pub mod method;
pub mod model;
pub mod operator;
pub mod phases;
pub mod spectrum;
pub mod subproblem;

pub use error::{Error, Result};
pub use field::{PhysicalField, SpectralField};
pub use grid::Grid;
pub use model::{HessianOperator, ModelParams};
