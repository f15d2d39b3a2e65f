#![allow(dead_code)]

use landau_tr::operator::DenseSplit;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub struct DenseInstance {
    pub h: DenseSplit,
    pub g: Vec<f64>,
    pub r: f64,
    /// Smallest eigenvalue of `D + T` and the component of `g` along it.
    pub sigma1: f64,
    pub g1: f64,
}

/// Random `D + T` with nonnegative diagonal `D`, symmetric `T` and a mixed-sign spectrum.
pub fn dense_instance(rng: &mut ChaCha8Rng, n: usize) -> DenseInstance {
    loop {
        let d: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
        let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let t = (&a + a.transpose()) * (0.5 / (n as f64).sqrt()) - DMatrix::identity(n, n) * 1.5;
        let h = DenseSplit::new(d, t);
        let g: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let r = rng.gen_range(0.2..3.0);
        let eig = SymmetricEigen::new(h.matrix());
        let (i1, sigma1) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, s)| (i, *s))
            .unwrap();
        let g1 = eig.eigenvectors.column(i1).iter().zip(&g).map(|(a, b)| a * b).sum::<f64>();
        if g1.abs() > 1e-8 {
            return DenseInstance { h, g, r, sigma1, g1 };
        }
    }
}

pub fn objective(h: &DenseSplit, g: &[f64], d: &[f64]) -> f64 {
    let m = h.matrix();
    let dv = nalgebra::DVector::from_column_slice(d);
    let gv = nalgebra::DVector::from_column_slice(g);
    gv.dot(&dv) + 0.5 * dv.dot(&(&m * &dv))
}
