//! SIS and SSIS1 gradient flows on a 2-D hexagonal-forming problem,
//! printing the energy every 50 steps.

use landau_tr::baselines::{sis_run, ssis1_run, FlowParams};
use landau_tr::phases::seed;
use landau_tr::phases::SeedName;
use landau_tr::{Grid, ModelParams};

fn main() -> landau_tr::Result<()> {
    let p = ModelParams::new(-0.1, 0.5)?;
    let grid = Grid::cubic(32, 2, 4.0 * std::f64::consts::PI)?.shared();
    let v0 = seed(SeedName::Random, &grid, 0.05, 3)?;
    let fp = FlowParams { max_steps: 400, ..FlowParams::default() };
    for (name, out) in [("sis", sis_run(v0.clone(), &p, &fp)?), ("ssis1", ssis1_run(v0, &p, &fp)?)] {
        println!("{name}:");
        for rec in out.trace.iter().step_by(50) {
            println!("  step {:4}  E = {:+.10e}  |g| = {:.2e}", rec.step, rec.energy, rec.grad_inf);
        }
        println!("  final E = {:+.10e} after {} steps (converged: {})", out.energy, out.steps, out.converged);
    }
    Ok(())
}
