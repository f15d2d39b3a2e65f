//! Smallest Hessian eigenvalues at the disordered state and at a converged
//! hexagonal state, with their classification.

use landau_tr::baselines::{sis_run, FlowParams};
use landau_tr::phases::{PhaseSeed, SeedName};
use landau_tr::spectrum::{analyze, EigOptions};
use landau_tr::{ModelParams, SpectralField};

fn show(label: &str, u: &SpectralField, p: &ModelParams) -> landau_tr::Result<()> {
    let rep = analyze(u, p, &EigOptions { m: 4, ..EigOptions::default() }, 1e-10)?;
    println!("{label}: {}", rep.classification.map(|c| c.to_string()).unwrap_or_default());
    for (s, r) in rep.eigenvalues.iter().zip(&rep.residuals) {
        println!("  sigma = {s:+.6e}  residual {r:.1e}");
    }
    Ok(())
}

fn main() -> landau_tr::Result<()> {
    let p = ModelParams::new(-0.28, 0.32)?;
    let seed = PhaseSeed::standard(SeedName::Hex, 0.3);
    let grid = seed.natural_grid(16)?.shared();
    show("disorder", &SpectralField::zeros(grid.clone()), &p)?;
    let hex = sis_run(seed.to_field(&grid, 0)?, &p, &FlowParams::default())?;
    show(&format!("hex (E = {:.8e})", hex.energy), &hex.v, &p)?;
    Ok(())
}
