use std::f64::consts::PI;
use std::sync::Arc;

use landau_tr::baselines::{flow, sis_run, ssis1_run, FlowParams, Scheme};
use landau_tr::model::{energy, hessian_at, t_norm_bound};
use landau_tr::phases::{PhaseSeed, SeedName};
use landau_tr::{Grid, ModelParams, SpectralField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid() -> Arc<Grid> {
    Grid::cubic(16, 2, 4.0 * PI).unwrap().shared()
}

fn random_low(grid: &Arc<Grid>, amp: f64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = SpectralField::zeros(grid.clone());
    for k in [[1i64, 0], [0, 1], [1, 1], [1, -1], [2, 0], [0, 2], [2, 1], [1, 2], [3, 1]] {
        u.set_mode(&k, Complex64::new(amp * rng.gen_range(-1.0..1.0), amp * rng.gen_range(-1.0..1.0)));
    }
    u.pin_mean();
    u
}

#[test]
fn zero_is_a_fixed_point() {
    let p = ModelParams::new(-0.35, 0.7).unwrap();
    for out in [
        sis_run(SpectralField::zeros(grid()), &p, &FlowParams::default()).unwrap(),
        ssis1_run(SpectralField::zeros(grid()), &p, &FlowParams::default()).unwrap(),
    ] {
        assert!(out.converged);
        assert_eq!(out.steps, 0);
        assert_eq!(out.v.norm(), 0.0);
    }
}

#[test]
fn zero_stabilization_is_sis() {
    let p = ModelParams::new(-0.3, 0.5).unwrap();
    let fp = FlowParams { max_steps: 60, stab: Some(0.0), ..FlowParams::default() };
    let v0 = random_low(&grid(), 0.3, 1);
    let a = sis_run(v0.clone(), &p, &fp).unwrap();
    let b = ssis1_run(v0, &p, &fp).unwrap();
    assert_eq!(a.steps, b.steps);
    let diff = a.v.as_real().iter().zip(b.v.as_real()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(diff < 1e-14, "diff {diff}");
}

#[test]
fn stabilized_flow_decreases_energy_and_keeps_mean() {
    let p = ModelParams::new(-0.3, 0.5).unwrap();
    for seed in 0..4 {
        let v0 = random_low(&grid(), 0.4, seed);
        let s = t_norm_bound(&hessian_at(&v0, &p).unwrap());
        let fp = FlowParams { dt: 0.1, stab: Some(s), max_steps: 400, ..FlowParams::default() };
        let mut energies = Vec::new();
        flow(Scheme::Ssis1, v0, &p, &fp, |_, v| {
            assert!(v.is_mean_pinned());
            energies.push(energy(v, &p).unwrap());
        })
        .unwrap();
        assert!(energies.len() > 2);
        for w in energies.windows(2) {
            assert!(w[1] <= w[0] + 1e-14, "energy rose {} -> {}", w[0], w[1]);
        }
    }
}

#[test]
fn sis_stagnates_at_the_lamellar_saddle() {
    // Example 1 physics at M = 8: the flow keeps the lamellar symmetry.
    let p = ModelParams::new(-0.35, 0.7).unwrap();
    let seed = PhaseSeed::standard(SeedName::Lam, 0.3);
    let g = seed.natural_grid(8).unwrap().shared();
    let out = sis_run(seed.to_field(&g, 0).unwrap(), &p, &FlowParams::default()).unwrap();
    assert!(out.converged);
    let shell: usize = out.v.coeffs().iter().filter(|c| c.norm() > 1e-12).count();
    // only (n,0,0) harmonics survive
    for (i, c) in out.v.coeffs().iter().enumerate() {
        if c.norm() > 1e-12 {
            let k = g.wavevector(i);
            assert!(k[1] == 0 && k[2] == 0, "{k:?}");
        }
    }
    assert!(shell >= 2);
}

#[test]
fn trace_records_every_step() {
    let p = ModelParams::new(-0.3, 0.5).unwrap();
    let fp = FlowParams { max_steps: 25, ..FlowParams::default() };
    let out = sis_run(random_low(&grid(), 0.3, 5), &p, &fp).unwrap();
    assert!(!out.converged);
    assert_eq!(out.steps, 25);
    // step 0 is the starting point
    assert_eq!(out.trace.len(), 26);
    assert_eq!(out.trace[0].step, 0);
    let mut buf = Vec::new();
    landau_tr::baselines::write_flow_csv(&mut buf, &out.trace).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 27);
    assert!(text.lines().nth(1).unwrap().contains(",flow,"));
}
