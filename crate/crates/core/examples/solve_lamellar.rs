//! Trust region versus the SIS flow from the lamellar seed at (-0.35, 0.7).
//!
//! The flow stops at the lamellar saddle; the trust region leaves it and
//! ends at a lower second-order point. Pass the grid size as the first
//! argument (default 16).

use landau_tr::baselines::{sis_run, FlowParams};
use landau_tr::driver::{run, TRParams};
use landau_tr::phases::{PhaseSeed, SeedName};
use landau_tr::spectrum::{analyze, EigOptions};
use landau_tr::ModelParams;

fn main() -> landau_tr::Result<()> {
    let m = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(16);
    let p = ModelParams::new(-0.35, 0.7)?;
    let seed = PhaseSeed::standard(SeedName::Lam, 0.3);
    let grid = seed.natural_grid(m)?.shared();
    let v0 = seed.to_field(&grid, 0)?;
    let eig = EigOptions { m: 4, ..EigOptions::default() };

    let sis = sis_run(v0.clone(), &p, &FlowParams::default())?;
    let rep = analyze(&sis.v, &p, &eig, 1e-10)?;
    println!("sis: E = {:.10e} after {} steps, sigma1 = {:+.3e}", sis.energy, sis.steps, rep.eigenvalues[0]);

    let tp = TRParams { start_jitter: 1e-6, ..TRParams::default() };
    let tr = run(v0, &p, &tp)?;
    let rep = analyze(&tr.v, &p, &eig, 1e-10)?;
    println!("tr:  E = {:.10e} after {} iterations, sigma1 = {:+.3e}", tr.energy, tr.iterations, rep.eigenvalues[0]);
    if let Some(c) = rep.classification {
        println!("tr endpoint is {c}");
    }
    Ok(())
}
