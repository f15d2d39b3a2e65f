//! Dense reference solution of the trust-region subproblem through a full
//! eigendecomposition. Only meant for small test instances.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Global minimizer of `g.d + 1/2 d.H d` over `|d| <= r`, with its multiplier.
///
/// Handles the hard case, where `g` is orthogonal to the bottom eigenspace
/// and the multiplier sits at `-sigma_1`.
pub fn dense_oracle(g: &[f64], h: &DMatrix<f64>, r: f64) -> (Vec<f64>, f64) {
    let n = g.len();
    assert_eq!(h.nrows(), n);
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let sigma: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let q: Vec<DVector<f64>> = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    let gv = DVector::from_column_slice(g);
    let gt: Vec<f64> = q.iter().map(|qi| qi.dot(&gv)).collect();
    let g_norm = gv.norm();

    let scale = sigma.iter().fold(1.0f64, |m, s| m.max(s.abs()));
    let bottom_tol = 1e-12 * scale;
    let is_bottom = |i: usize| sigma[i] <= sigma[0] + bottom_tol;
    let coeff_tol = 1e-14 * g_norm.max(1e-300);

    let norm_at = |lambda: f64| -> f64 {
        gt.iter()
            .zip(&sigma)
            .map(|(c, s)| if *c == 0.0 { 0.0 } else { (c / (s + lambda)).powi(2) })
            .sum::<f64>()
            .sqrt()
    };
    let assemble = |lambda: f64, skip_bottom: bool| -> DVector<f64> {
        let mut d = DVector::zeros(n);
        for i in 0..n {
            if skip_bottom && is_bottom(i) {
                continue;
            }
            if gt[i] != 0.0 {
                d -= &q[i] * (gt[i] / (sigma[i] + lambda));
            }
        }
        d
    };

    // interior solution
    if sigma[0] > bottom_tol && norm_at(0.0) <= r {
        return (assemble(0.0, false).as_slice().to_vec(), 0.0);
    }

    let lambda_low = (-sigma[0]).max(0.0);
    let bottom_empty = (0..n).filter(|&i| is_bottom(i)).all(|i| gt[i].abs() <= coeff_tol);
    if bottom_empty {
        let inner: f64 = (0..n)
            .filter(|&i| !is_bottom(i))
            .map(|i| (gt[i] / (sigma[i] + lambda_low)).powi(2))
            .sum::<f64>()
            .sqrt();
        if inner <= r {
            let mut d = assemble(lambda_low, true);
            let tail = (r * r - inner * inner).max(0.0).sqrt();
            d += &q[0] * tail;
            return (d.as_slice().to_vec(), lambda_low);
        }
    }

    // boundary solution: bisection on |d(lambda)| = r, then Newton polish
    let mut lo = lambda_low;
    let mut hi = (g_norm / r - sigma[0]).max(lambda_low) + 1e-12 * (1.0 + lambda_low);
    while norm_at(hi) > r {
        hi = 2.0 * hi + 1.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if norm_at(mid) > r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut lambda = 0.5 * (lo + hi);
    for _ in 0..5 {
        // Newton on 1/|d| - 1/r, which is nearly linear in lambda
        let nrm = norm_at(lambda);
        let dn: f64 = gt
            .iter()
            .zip(&sigma)
            .map(|(c, s)| -c * c / (s + lambda).powi(3))
            .sum::<f64>()
            / nrm;
        let f = 1.0 / nrm - 1.0 / r;
        let df = -dn / (nrm * nrm);
        let next = lambda - f / df;
        if !next.is_finite() || next <= lambda_low {
            break;
        }
        lambda = next;
    }
    (assemble(lambda, false).as_slice().to_vec(), lambda)
}
