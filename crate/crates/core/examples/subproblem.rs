//! The implicit-explicit subproblem solver on a small dense problem,
//! checked against an eigendecomposition-based solution.

use landau_tr::operator::DenseSplit;
use landau_tr::subproblem::{dense_oracle, solve, solve_radius_multiplier, SubproblemSpec};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let n = 12;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let d: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-0.5..0.5));
    let t = (&a + a.transpose()) * 0.5 - DMatrix::identity(n, n);
    let h = DenseSplit::new(d.clone(), t);
    let g: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let r = 0.8;

    let res = solve(&SubproblemSpec::new(&g, &h, r, 0.1));
    let (d_ref, lambda_ref) = dense_oracle(&g, &h.matrix(), r);
    let gap: f64 = res.d.iter().zip(&d_ref).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    println!("imex:   lambda = {:.12}, model = {:.12e}, {} iterations", res.lambda, res.model_value, res.iterations);
    println!("oracle: lambda = {lambda_ref:.12}, |d - d_ref| = {gap:.2e}, KKT residual {:.1e}", res.kkt_residual);

    // the scalar root-finder used inside each iteration
    let lambda = solve_radius_multiplier(&g, &d, 0.1, 0.05);
    println!("secular multiplier for r = 0.05: {lambda:.12}");
}
