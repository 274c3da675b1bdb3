//! Error type shared by all loop operations.

use thiserror::Error;

/// Errors raised by loop arithmetic, factorization and the harness.
#[derive(Error, Debug)]
pub enum LoopError {
    #[error("matrix size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("grid of length {grid} cannot resolve degree {degree} (need G >= 2*degree+1)")]
    Aliasing { grid: usize, degree: usize },

    #[error("input is not skew-Hermitian: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotSkewHermitian { defect: f64, tol: f64 },

    #[error("input is not unitary: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotUnitary { defect: f64, tol: f64 },

    #[error("eigenvalue phase within {margin:.3} rad of the log branch cut at -1 (sigma_min(I+U) = {sigma_min:.3e}); refine the partition or supply pre-factored input")]
    BranchCut { sigma_min: f64, margin: f64 },

    #[error("basis slot (r={r}, k={k}) is fake (k = 0 with even r spans nothing new)")]
    FakeSlot { r: usize, k: usize },

    #[error("loop degree {degree} exceeds basis degree m = {m}")]
    DegreeOverflow { degree: usize, m: usize },

    #[error("embedding indices (i={i}, j={j}) out of range for size {n} (need 1 <= i < j <= N)")]
    BadEmbedding { i: usize, j: usize, n: usize },

    #[error("approximation plan infeasible: {0}")]
    InfeasiblePlan(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("rate fit needs at least {need} points above the noise floor, got {got}")]
    DegenerateFit { need: usize, got: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("bad file contents: {0}")]
    BadFile(String),
}
