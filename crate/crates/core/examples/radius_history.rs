//! Per-iteration trust-region trace from a random start in 2-D:
//! branch taken, radius, ratio and inner iteration count.

use landau_tr::driver::{run_with_observer, TRParams};
use landau_tr::phases::{seed, SeedName};
use landau_tr::{Grid, ModelParams};

fn main() -> landau_tr::Result<()> {
    let p = ModelParams::new(-0.2, 0.4)?;
    let grid = Grid::cubic(16, 2, 2.0 * 2f64.sqrt() * std::f64::consts::PI)?.shared();
    let v0 = seed(SeedName::Random, &grid, 0.1, 11)?;
    let out = run_with_observer(v0, &p, &TRParams::default(), |state| {
        if let Some(rec) = state.trace.records.last() {
            println!(
                "{:3} {:8} r = {:.3e}  rho = {:>10}  E = {:+.10e}  inner {}",
                rec.iter,
                rec.branch.as_str(),
                rec.radius,
                rec.rho.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "-".into()),
                rec.energy,
                rec.sub_iters
            );
        }
    })?;
    println!("done: E = {:+.12e}, |g| = {:.1e}, converged {}", out.energy, out.grad_inf, out.converged);
    Ok(())
}
