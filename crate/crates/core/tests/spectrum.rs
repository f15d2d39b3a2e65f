use std::sync::Arc;

use landau_tr::model::{gradient, hessian_at};
use landau_tr::spectrum::{bottom_direction_overlap, davidson, smallest_eigs, EigOptions};
use landau_tr::{Grid, HessianOperator, ModelParams, SpectralField};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_field(grid: &Arc<Grid>, amp: f64, rng: &mut ChaCha8Rng) -> SpectralField {
    let mut u = SpectralField::zeros(grid.clone());
    for _ in 0..20 {
        let k: Vec<i64> = (0..grid.dim()).map(|_| rng.gen_range(-3..=3)).collect();
        u.set_mode(&k, Complex64::new(amp * rng.gen_range(-1.0..1.0), amp * rng.gen_range(-1.0..1.0)));
    }
    u.project_mean_zero()
}

/// Orthonormal basis of the Hermitian, mean-free subspace in the interleaved view.
fn hermitian_basis(grid: &Grid) -> Vec<Vec<f64>> {
    let n = grid.len();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::new();
    for k in 1..n {
        let c = grid.conjugate_index(k);
        let mut re = vec![0.0; 2 * n];
        if c == k {
            re[2 * k] = 1.0;
            basis.push(re);
        } else if k < c {
            let mut im = vec![0.0; 2 * n];
            re[2 * k] = s;
            re[2 * c] = s;
            im[2 * k + 1] = s;
            im[2 * c + 1] = -s;
            basis.push(re);
            basis.push(im);
        }
    }
    basis
}

fn dense_spectrum(h: &HessianOperator) -> Vec<f64> {
    use landau_tr::operator::LinearOperator;
    let basis = hermitian_basis(h.grid());
    let k = basis.len();
    let images: Vec<Vec<f64>> = basis
        .iter()
        .map(|b| {
            let mut y = vec![0.0; b.len()];
            LinearOperator::apply(h, b, &mut y);
            y
        })
        .collect();
    let a = DMatrix::from_fn(k, k, |i, j| basis[i].iter().zip(&images[j]).map(|(x, y)| x * y).sum::<f64>());
    let a = (&a + a.transpose()) * 0.5;
    let mut ev: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[test]
fn disorder_state_bottom_is_tau() {
    // L = 2 pi puts the integer points (+-1, 0), (0, +-1) on the unit shell
    let grid = Grid::cubic(8, 2, 2.0 * std::f64::consts::PI).unwrap().shared();
    let p = ModelParams::new(-0.1, 0.4).unwrap();
    let h = hessian_at(&SpectralField::zeros(grid), &p).unwrap();
    let rep = smallest_eigs(&h, &EigOptions::default());
    assert!(rep.converged);
    for s in &rep.eigenvalues {
        assert!((s + 0.1).abs() < 1e-10, "{s}");
    }
}

#[test]
fn matches_dense_eigendecomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let grid = Grid::cubic(8, 2, 9.0).unwrap().shared();
    let p = ModelParams::new(-0.2, 0.5).unwrap();
    for _ in 0..3 {
        let u = random_field(&grid, 0.3, &mut rng);
        let h = hessian_at(&u, &p).unwrap();
        let dense = dense_spectrum(&h);
        let rep = smallest_eigs(&h, &EigOptions { m: 6, ..Default::default() });
        assert!(rep.converged);
        for (a, b) in rep.eigenvalues.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        // Rayleigh quotients and orthogonality
        let vecs = rep.eigenvectors.as_ref().unwrap();
        for (i, x) in vecs.iter().enumerate() {
            let hx = h.apply(x).unwrap();
            let rq = x.dot(&hx).unwrap() / x.dot(x).unwrap();
            assert!((rq - rep.eigenvalues[i]).abs() < 1e-8);
            assert!(x.hermitian_residue() < 1e-12);
            for y in &vecs[..i] {
                assert!(x.dot(y).unwrap().abs() < 1e-8);
            }
        }
    }
}

#[test]
fn seeded_runs_are_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = Grid::cubic(8, 3, 9.0).unwrap().shared();
    let p = ModelParams::new(-0.2, 0.5).unwrap();
    let h = hessian_at(&random_field(&grid, 0.3, &mut rng), &p).unwrap();
    let opts = EigOptions { seed: 99, ..Default::default() };
    let a = davidson(&h, &opts);
    let b = davidson(&h, &opts);
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((x - y).abs() <= 1e-12);
    }
}

#[test]
fn bottom_overlap_limits() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let grid = Grid::cubic(8, 2, 9.0).unwrap().shared();
    let p = ModelParams::new(-0.3, 0.5).unwrap();
    let u = random_field(&grid, 0.3, &mut rng);
    let h = hessian_at(&u, &p).unwrap();
    let opts = EigOptions::default();
    let rep = smallest_eigs(&h, &EigOptions { m: 2, ..opts });
    let xi = &rep.eigenvectors.as_ref().unwrap()[0];
    let along = xi.clone().scaled(2.5);
    assert!((bottom_direction_overlap(&h, &along, &opts).unwrap().abs() - 2.5).abs() < 1e-7);
    let across = rep.eigenvectors.as_ref().unwrap()[1].clone();
    assert!(bottom_direction_overlap(&h, &across, &opts).unwrap().abs() < 1e-7);
    // a generic gradient against the dense bottom vector
    let g = gradient(&u, &p).unwrap();
    let ov = bottom_direction_overlap(&h, &g, &opts).unwrap();
    assert!((ov.abs() - xi.dot(&g).unwrap().abs()).abs() < 1e-7);
}
