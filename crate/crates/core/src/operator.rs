//! Operator traits shared by the subproblem, Krylov and eigen solvers.
//!
//! Vectors are plain `f64` slices. Spectral fields enter through their
//! interleaved `(re, im)` view, whose Euclidean inner product is the real
//! inner product of the optimization space.

/// A symmetric linear operator on `R^n`.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// `y = A x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// Diagonal of `A` in the working basis, when cheaply available.
    fn diagonal(&self) -> Option<Vec<f64>> {
        None
    }

    /// Maps an arbitrary vector onto the admissible subspace (identity by default).
    fn project(&self, _x: &mut [f64]) {}
}

/// An operator split as `H = D + T`, with `D` diagonal and nonnegative in the
/// working basis and `T` symmetric, applied explicitly.
pub trait SplitHessian {
    fn dim(&self) -> usize;

    /// The diagonal of `D`.
    fn implicit_diagonal(&self) -> &[f64];

    /// `y = T x`.
    fn apply_explicit(&self, x: &[f64], y: &mut [f64]);

    /// Diagonal of `T` in the working basis.
    fn explicit_diagonal(&self) -> Vec<f64>;

    fn project(&self, _x: &mut [f64]) {}
}

impl<S: SplitHessian> LinearOperator for S {
    fn dim(&self) -> usize {
        SplitHessian::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.apply_explicit(x, y);
        for ((yi, xi), di) in y.iter_mut().zip(x).zip(self.implicit_diagonal()) {
            *yi += di * xi;
        }
    }

    fn diagonal(&self) -> Option<Vec<f64>> {
        let mut diag = self.explicit_diagonal();
        for (t, d) in diag.iter_mut().zip(self.implicit_diagonal()) {
            *t += d;
        }
        Some(diag)
    }

    fn project(&self, x: &mut [f64]) {
        SplitHessian::project(self, x)
    }
}

/// Dense symmetric split `D + T`, used for small test problems and oracles.
#[derive(Debug, Clone)]
pub struct DenseSplit {
    pub d: Vec<f64>,
    pub t: nalgebra::DMatrix<f64>,
}

impl DenseSplit {
    pub fn new(d: Vec<f64>, t: nalgebra::DMatrix<f64>) -> Self {
        assert_eq!(t.nrows(), d.len());
        assert_eq!(t.ncols(), d.len());
        Self { d, t }
    }

    /// The assembled matrix `D + T`.
    pub fn matrix(&self) -> nalgebra::DMatrix<f64> {
        let mut h = self.t.clone();
        for (i, di) in self.d.iter().enumerate() {
            h[(i, i)] += di;
        }
        h
    }
}

impl SplitHessian for DenseSplit {
    fn dim(&self) -> usize {
        self.d.len()
    }

    fn implicit_diagonal(&self) -> &[f64] {
        &self.d
    }

    fn apply_explicit(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.t.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    fn explicit_diagonal(&self) -> Vec<f64> {
        self.t.diagonal().iter().copied().collect()
    }
}
