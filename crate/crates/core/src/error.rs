use thiserror::Error;

/// Errors raised by the solver toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid resolution M={0}: need an even value >= 4")]
    InvalidResolution(usize),
    #[error("unsupported spatial dimension {0}: expected 1, 2 or 3")]
    InvalidDimension(usize),
    #[error("reciprocal lattice matrix must be {expected}x{expected}, got {got} entries")]
    LatticeShape { expected: usize, got: usize },
    #[error("reciprocal lattice matrix is singular (|det| = {0:e})")]
    SingularLattice(f64),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("field length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("field contains non-finite values")]
    NonFinite,
    #[error("spectral field is not Hermitian-symmetric (imaginary residue {0:e})")]
    NonHermitian(f64),
    #[error("spectral field mean mode is not pinned to zero (|coeff(0)| = {0:e})")]
    MeanNotPinned(f64),
    #[error("shifted linear solve failed: shift {shift:e} too small ({reason})")]
    ShiftTooSmall { shift: f64, reason: String },
    #[error("eigensolver did not converge: {0}")]
    EigenNotConverged(String),
    #[error("unknown phase seed '{0}'")]
    UnknownSeed(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("solver diverged: {0}")]
    Diverged(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
