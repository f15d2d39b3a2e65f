//! A 2 x 2 phase sweep at M = 8 with the HEX flow state against the FDDD
//! trust-region state, written as CSV to stdout.

use landau_tr::baselines::FlowParams;
use landau_tr::driver::TRParams;
use landau_tr::method::Method;
use landau_tr::phases::{sweep, write_sweep_csv, Candidate, SeedName, SweepSpec};
use landau_tr::spectrum::EigOptions;

fn main() -> landau_tr::Result<()> {
    let spec = SweepSpec {
        taus: vec![-0.30, -0.26],
        gammas: vec![0.30, 0.34],
        candidates: vec![Candidate { method: Method::Sis, ..Candidate::new(SeedName::Hex) }, Candidate::new(SeedName::Fddd)],
        m: 8,
        tr: TRParams { start_jitter: 1e-6, ..TRParams::default() },
        flow: FlowParams::default(),
        eig: EigOptions { m: 4, ..EigOptions::default() },
        jobs: 2,
        warm_start: false,
        seed: 0,
    };
    let cells = sweep(&spec)?;
    write_sweep_csv(std::io::stdout().lock(), &cells)?;
    Ok(())
}
