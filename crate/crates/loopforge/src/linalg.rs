//! Dense complex linear algebra on the (skew-Hermitian, unitary) pair.
//!
//! All matrices are `nalgebra` dynamic matrices over `Complex<f64>`. The
//! matrix norm of choice throughout the crate is the spectral norm. The
//! exponential and logarithm go through eigendecompositions of Hermitian
//! matrices, so unitarity of `exp` and skewness of `log` hold to roundoff
//! rather than to a truncation tolerance.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::LoopError;
use crate::Result;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

/// Relative tolerance for the skew-Hermitian precondition of [`matrix_exp_skew`].
pub const SKEW_TOL: f64 = 1e-12;

/// Safety margin (radians) kept between eigenvalue phases and the log
/// branch cut at -1.
pub const LOG_BRANCH_MARGIN: f64 = 0.1;

/// Spectral norm (largest singular value).
pub fn spectral_norm(a: &CMat) -> f64 {
    if a.nrows() == 2 && a.ncols() == 2 {
        return spectral_norm_2x2(a);
    }
    a.clone().singular_values().max()
}

/// Closed-form largest singular value of a 2x2 complex matrix, via the
/// eigenvalues of A^H A. The grid sweeps call this millions of times.
fn spectral_norm_2x2(a: &CMat) -> f64 {
    let g00 = a[(0, 0)].norm_sqr() + a[(1, 0)].norm_sqr();
    let g11 = a[(0, 1)].norm_sqr() + a[(1, 1)].norm_sqr();
    let g01 = a[(0, 0)].conj() * a[(0, 1)] + a[(1, 0)].conj() * a[(1, 1)];
    let tr = g00 + g11;
    let disc = ((g00 - g11) * (g00 - g11) + 4.0 * g01.norm_sqr()).max(0.0);
    (0.5 * (tr + disc.sqrt())).max(0.0).sqrt()
}

/// Frobenius norm, used only as a cheap scale estimate.
pub fn frobenius_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian defect `||A - A^H||`.
pub fn hermitian_defect(a: &CMat) -> f64 {
    spectral_norm(&(a - a.adjoint()))
}

/// Skew-Hermitian defect `||A + A^H||`.
pub fn skew_defect(a: &CMat) -> f64 {
    spectral_norm(&(a + a.adjoint()))
}

/// Unitarity defect `||A^H A - I||`.
pub fn unitarity_defect(a: &CMat) -> f64 {
    let n = a.nrows();
    spectral_norm(&(a.adjoint() * a - CMat::identity(n, n)))
}

/// Matrix commutator `[A, B] = AB - BA`.
pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Returns `(V, lambda)` with `H = V diag(lambda) V^H` and `V` unitary.
fn hermitian_eigen(h: &CMat) -> (CMat, DVector<f64>) {
    let se = nalgebra::SymmetricEigen::new(h.clone());
    (se.eigenvectors, se.eigenvalues)
}

/// Exponential of a skew-Hermitian matrix.
///
/// Diagonalizes the Hermitian matrix `-iX` so the result is unitary to
/// roundoff; a traceless input yields determinant 1 to roundoff. Rejects
/// inputs whose skew defect exceeds [`SKEW_TOL`] relative to `||X||`.
pub fn matrix_exp_skew(x: &CMat) -> Result<CMat> {
    let scale = spectral_norm(x);
    let defect = skew_defect(x);
    let tol = SKEW_TOL * scale.max(1.0);
    if defect > tol {
        return Err(LoopError::NotSkewHermitian { defect, tol });
    }
    // H = -iX is Hermitian; e^X = e^{iH} = V diag(e^{i lambda}) V^H.
    let h = x.map(|z| C64::new(0.0, -1.0) * z);
    let (v, lambda) = hermitian_eigen(&h);
    let phases = DVector::from_iterator(
        lambda.len(),
        lambda.iter().map(|&l| C64::new(l.cos(), l.sin())),
    );
    Ok(&v * CMat::from_diagonal(&phases) * v.adjoint())
}

/// Principal logarithm of a unitary matrix.
///
/// Goes through the Cayley transform `W = (I - U)(I + U)^{-1}`, which is
/// skew-Hermitian whenever `U` is unitary. Diagonalizing the Hermitian
/// matrix `-iW` recovers the eigenvalue phases as `-2 atan(nu)`, which lie
/// in (-pi, pi) by construction, so the same eigenvectors give the
/// principal log directly. Eigenvalues closer than [`LOG_BRANCH_MARGIN`]
/// to the branch cut at -1 are rejected: for unitary `U` the smallest
/// singular value of `I + U` equals `2 cos(theta_max / 2)`, so the gate is
/// exact, not heuristic.
pub fn matrix_log_principal(u: &CMat) -> Result<CMat> {
    let n = u.nrows();
    let udef = unitarity_defect(u);
    if udef > 1e-8 {
        return Err(LoopError::NotUnitary {
            defect: udef,
            tol: 1e-8,
        });
    }
    let id = CMat::identity(n, n);
    let ipu = &id + u;
    let sigma_min = ipu.clone().singular_values().min();
    // |theta| <= pi - margin  <=>  sigma_min(I+U) >= 2 sin(margin/2)
    let gate = 2.0 * (LOG_BRANCH_MARGIN / 2.0).sin();
    if sigma_min < gate {
        return Err(LoopError::BranchCut {
            sigma_min,
            margin: LOG_BRANCH_MARGIN,
        });
    }
    let w = (&id - u)
        * ipu
            .lu()
            .try_inverse()
            .expect("I+U invertible past the branch gate");
    // K = -iW is Hermitian with eigenvalues nu; U = V diag((1-i nu)/(1+i nu)) V^H
    // and the principal phases are theta = -2 atan(nu).
    let k = w.map(|z| C64::new(0.0, -1.0) * z);
    let (v, nu) = hermitian_eigen(&k);
    let log_eigs = DVector::from_iterator(
        nu.len(),
        nu.iter().map(|&x| C64::new(0.0, -2.0 * x.atan())),
    );
    let raw = &v * CMat::from_diagonal(&log_eigs) * v.adjoint();
    // Re-skew to kill the roundoff Hermitian part.
    Ok((&raw - raw.adjoint()) * C64::new(0.5, 0.0))
}

/// Identity matrix of size n.
pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Determinant via LU.
pub fn determinant(a: &CMat) -> C64 {
    a.clone().lu().determinant()
}
