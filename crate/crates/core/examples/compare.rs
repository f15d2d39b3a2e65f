//! Restarts the trust region from snapshots of a SIS run and compares the
//! endpoints. Uses the bundled Example 1 configuration at M = 16.

use landau_tr::cli::{compare, initial_field};
use landau_tr::config::RunConfig;
use landau_tr::method::Method;

fn main() -> landau_tr::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/example1.toml");
    let mut cfg = RunConfig::load(path.as_ref())?;
    cfg.grid.m = 16;
    cfg.solver.method = Method::Sis;
    let v0 = initial_field(&cfg)?;
    let rep = compare(&cfg, v0)?;
    println!("{} flow: E = {:.10e}", rep.flow_method, rep.flow_energy);
    for leg in &rep.legs {
        println!(
            "{:12} step {:5}  start {:+.8e} -> {:+.10e}  {}",
            leg.stage, leg.flow_step, leg.start_energy, leg.final_energy, leg.classification
        );
    }
    println!("spread {:.2e}", rep.spread);
    Ok(())
}
