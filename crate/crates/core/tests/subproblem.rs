mod common;

use common::{dense_instance, objective};
use landau_tr::operator::LinearOperator;
use landau_tr::subproblem::{
    dense_oracle, phi, solve, solve_radius_multiplier_traced, SubproblemSpec, SECULAR_RTOL,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn oracle_zero_gradient() {
    let h = DMatrix::<f64>::identity(3, 3);
    let (d, lambda) = dense_oracle(&[0.0; 3], &h, 2.0);
    assert_eq!(lambda, 0.0);
    assert!(d.iter().all(|v| *v == 0.0));
}

#[test]
fn matches_dense_oracle_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_gap = 0.0f64;
    for _ in 0..40 {
        let n = rng.gen_range(2..=32);
        let inst = dense_instance(&mut rng, n);
        let mut spec = SubproblemSpec::new(&inst.g, &inst.h, inst.r, 0.1);
        spec.max_outer = 200_000;
        let res = solve(&spec);
        assert!(res.converged, "n={n} residual {:e}", res.kkt_residual);
        let (d_ref, _) = dense_oracle(&inst.g, &inst.h.matrix(), inst.r);
        let gap = objective(&inst.h, &inst.g, &res.d) - objective(&inst.h, &inst.g, &d_ref);
        worst_gap = worst_gap.max(gap.abs());
        let norm = res.d.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm <= inst.r * (1.0 + 1e-12));
        assert!((res.lambda * (norm - inst.r)).abs() <= 1e-10);
    }
    assert!(worst_gap <= 1e-8, "{worst_gap:e}");
}

#[test]
fn kkt_residual_is_reported_faithfully() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let inst = dense_instance(&mut rng, 12);
    let mut spec = SubproblemSpec::new(&inst.g, &inst.h, inst.r, 0.1);
    spec.max_outer = 100_000;
    let res = solve(&spec);
    let mut hd = vec![0.0; 12];
    inst.h.apply(&res.d, &mut hd);
    let direct = hd
        .iter()
        .zip(&res.d)
        .zip(&inst.g)
        .map(|((a, d), g)| (a + res.lambda * d + g).powi(2))
        .sum::<f64>()
        .sqrt();
    assert!((direct - res.kkt_residual).abs() < 1e-14);
}

#[test]
fn safeguarded_step_descends_monotonically() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let inst = dense_instance(&mut rng, 16);
        let t_norm = inst.h.t.clone().symmetric_eigen().eigenvalues.amax();
        let eta = landau_tr::subproblem::default_eta(t_norm, landau_tr::subproblem::EtaMode::Safeguarded, 1.0);
        let mut spec = SubproblemSpec::new(&inst.g, &inst.h, inst.r, eta);
        spec.descent_a = Some(1.0);
        spec.max_outer = 200_000;
        let res = solve(&spec);
        assert_eq!(res.descent_violations, 0);
    }
}

#[test]
fn sign_invariant_along_bottom_direction() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let inst = dense_instance(&mut rng, 10);
        let eig = inst.h.matrix().symmetric_eigen();
        let i1 = eig.eigenvalues.imin();
        let xi: Vec<f64> = eig.eigenvectors.column(i1).iter().copied().collect();
        let mut spec = SubproblemSpec::new(&inst.g, &inst.h, inst.r, 0.1);
        spec.bottom_direction = Some(&xi);
        spec.max_outer = 100_000;
        assert_eq!(solve(&spec).sign_violations, 0);
    }
}

#[test]
fn secular_newton_iterates_increase() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let n = rng.gen_range(1..40);
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..5.0)).collect();
        let r = rng.gen_range(0.05..2.0);
        let mut iterates = Vec::new();
        let root = solve_radius_multiplier_traced(&b, &diag, 0.1, r, |l| iterates.push(l));
        assert!(iterates.windows(2).all(|w| w[1] > w[0]));
        let (v, _) = phi(root.lambda, &b, &diag, 0.1);
        if root.lambda > 0.0 {
            assert!((v - r * r).abs() <= SECULAR_RTOL * r * r);
        } else {
            assert!(v <= r * r);
        }
    }
}

#[test]
fn unconverged_solve_returns_best_iterate() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let inst = dense_instance(&mut rng, 20);
    let mut spec = SubproblemSpec::new(&inst.g, &inst.h, inst.r, 0.1);
    spec.max_outer = 3;
    let res = solve(&spec);
    assert!(!res.converged);
    assert_eq!(res.iterations, 3);
    assert!(res.kkt_residual.is_finite());
}
