//! Splitting schemes for products of exponentials: the first-order chain,
//! the symmetric second-order (half/full/half) method, and the Yoshida
//! triple-jump recursion that raises a symmetric method of order 2s to
//! order 2(s+1) with weights
//!
//! ```text
//! a_s = (2 - 2^{1/(2s+1)})^{-1},    b_s = -2^{1/(2s+1)} a_s .
//! ```
//!
//! A scheme is kept in flattened form — a sequence of (generator index,
//! scale) steps — because the flattened length is exactly what drives the
//! degree bookkeeping of polynomial-loop products: 2J-1 steps for the
//! second-order method and a factor 3 per recursion level.

use nalgebra::Complex;

use crate::error::LoopError;
use crate::linalg::{self, CMat};
use crate::loops::{next_pow2, TrigMatrixLoop, TRIM_TOL};
use crate::su2::{self, BasisCoeffs, FactorStep};
use crate::Result;

#[inline]
fn re(x: f64) -> Complex<f64> {
    Complex::new(x, 0.0)
}

/// Yoshida recursion constants `(a_s, b_s)`; they satisfy `2 a_s + b_s = 1`.
pub fn yoshida_coeffs(s: usize) -> (f64, f64) {
    assert!(s >= 1, "yoshida_coeffs needs s >= 1");
    let root = 2f64.powf(1.0 / (2.0 * s as f64 + 1.0));
    let a = 1.0 / (2.0 - root);
    (a, -root * a)
}

/// Flattened splitting scheme over J generators.
///
/// `half_order = 0` denotes the first-order chain; `half_order = s >= 1`
/// denotes the symmetric method of order 2s built by the Yoshida
/// recursion from the half/full/half base method.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingScheme {
    half_order: usize,
    generators: usize,
    /// (generator index in 0..J, scale) pairs, leftmost factor first.
    steps: Vec<(usize, f64)>,
}

impl SplittingScheme {
    /// Order parameter s (the method order is 2s, or 1 when s = 0).
    pub fn half_order(&self) -> usize {
        self.half_order
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn steps(&self) -> &[(usize, f64)] {
        &self.steps
    }

    /// Per-generator sums of scales; each equals 1 for a consistent scheme.
    pub fn scale_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.generators];
        for &(j, w) in &self.steps {
            sums[j] += w;
        }
        sums
    }

    /// True when the step sequence equals its reverse.
    pub fn is_palindromic(&self) -> bool {
        let n = self.steps.len();
        (0..n / 2).all(|i| {
            let (ja, wa) = self.steps[i];
            let (jb, wb) = self.steps[n - 1 - i];
            ja == jb && (wa - wb).abs() <= 1e-15 * wa.abs().max(1.0)
        })
    }
}

/// Builds the flattened scheme phi_1 (s = 0), phi_2 (s = 1) or the Yoshida
/// composition phi_{2s} (s >= 2) over J generators.
pub fn build_scheme(s: usize, generators: usize) -> SplittingScheme {
    assert!(generators >= 1, "need at least one generator");
    let steps = match s {
        0 => (0..generators).map(|j| (j, 1.0)).collect(),
        1 => {
            let mut steps: Vec<(usize, f64)> = (0..generators - 1).map(|j| (j, 0.5)).collect();
            steps.push((generators - 1, 1.0));
            steps.extend((0..generators - 1).rev().map(|j| (j, 0.5)));
            steps
        }
        _ => {
            let inner = build_scheme(s - 1, generators);
            let (a, b) = yoshida_coeffs(s - 1);
            let mut steps = Vec::with_capacity(3 * inner.steps.len());
            for scale in [a, b, a] {
                steps.extend(inner.steps.iter().map(|&(j, w)| (j, w * scale)));
            }
            steps
        }
    };
    SplittingScheme {
        half_order: s,
        generators,
        steps,
    }
}

/// Constant algebra-valued generators X_1..X_J.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    size: usize,
    generators: Vec<CMat>,
}

impl GeneratorSet {
    /// Validates that every generator is square, same-size and
    /// skew-Hermitian to 1e-10.
    pub fn new(generators: Vec<CMat>) -> Result<Self> {
        if generators.is_empty() {
            return Err(LoopError::InvalidParameter(
                "generator set must be non-empty".into(),
            ));
        }
        let size = generators[0].nrows();
        for g in &generators {
            if g.nrows() != size || g.ncols() != size {
                return Err(LoopError::SizeMismatch(g.nrows(), size));
            }
            let defect = linalg::skew_defect(g);
            if defect > 1e-10 {
                return Err(LoopError::NotSkewHermitian { defect, tol: 1e-10 });
            }
        }
        Ok(Self { size, generators })
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.generators
    }

    /// Sum of all generators.
    pub fn total(&self) -> CMat {
        let mut acc = CMat::zeros(self.size, self.size);
        for g in &self.generators {
            acc += g;
        }
        acc
    }

    /// Sum of the spectral norms of the generators.
    pub fn norm_sum(&self) -> f64 {
        self.generators.iter().map(linalg::spectral_norm).sum()
    }
}

/// Applies the scheme to constant generators:
/// `prod_steps exp(lambda * w * X_j)`, leftmost step first.
pub fn apply_scheme_matrices(
    scheme: &SplittingScheme,
    gens: &GeneratorSet,
    lambda: f64,
) -> Result<CMat> {
    if scheme.generators != gens.len() {
        return Err(LoopError::SizeMismatch(scheme.generators, gens.len()));
    }
    let mut acc = CMat::identity(gens.size(), gens.size());
    for &(j, w) in &scheme.steps {
        let factor = linalg::matrix_exp_skew(&(&gens.matrices()[j] * re(lambda * w)))?;
        acc *= factor;
    }
    Ok(acc)
}

/// Applies the scheme to the non-fake su(2) basis generators scaled by the
/// given coefficients: the ordered product over the flattened steps of
/// `exp(lambda * w * c_{r,k} B_{r,k}(t))`, with generator index j mapping
/// to the j-th non-fake slot in lexicographic order.
///
/// The result is SU(2)-valued for any coefficients; after trimming its
/// degree is at most 12m for the second-order scheme and gains a factor 3
/// per Yoshida level.
pub fn apply_scheme_loops(
    scheme: &SplittingScheme,
    coeffs: &BasisCoeffs,
    lambda: f64,
) -> Result<TrigMatrixLoop> {
    let slots = su2::lex_slots(coeffs.m());
    if scheme.generators != slots.len() {
        return Err(LoopError::SizeMismatch(scheme.generators, slots.len()));
    }
    let steps: Vec<FactorStep> = scheme
        .steps
        .iter()
        .map(|&(j, w)| {
            let (r, k) = slots[j];
            FactorStep {
                r,
                k,
                angle: lambda * w * coeffs.get(r, k),
            }
        })
        .collect();
    su2::factor_product(&steps)
}

/// Splitting scheme matched to the basis of degree m: J = 6m + 3 generators
/// in lexicographic slot order.
pub fn scheme_for_basis(s: usize, m: usize) -> SplittingScheme {
    build_scheme(s, 6 * m + 3)
}

/// Least-squares slope of log(error) vs log(lambda) for the scheme error
/// `||e^{lambda sum X_j} - phi(lambda)||` over the given lambda sweep.
/// The expected slope is 2s+1 (local error order).
pub fn order_study(gens: &GeneratorSet, s: usize, lambdas: &[f64]) -> Result<f64> {
    let rows = order_study_rows(gens, s, lambdas)?;
    crate::rates::fit_log_slope(&rows)
}

/// The (lambda, error) rows behind [`order_study`]. Refuses lambdas whose
/// largest scaled step leaves the bounded-step regime, where slopes are
/// meaningless.
pub fn order_study_rows(
    gens: &GeneratorSet,
    s: usize,
    lambdas: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let scheme = build_scheme(s, gens.len());
    let max_w = scheme
        .steps
        .iter()
        .map(|&(_, w)| w.abs())
        .fold(0.0, f64::max);
    let total = gens.total();
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        if lambda * max_w * gens.norm_sum() > 2.0 {
            return Err(LoopError::InvalidParameter(format!(
                "lambda {lambda} leaves the bounded-step regime (lambda * max|w| * sum||X|| > 2)"
            )));
        }
        let exact = linalg::matrix_exp_skew(&(&total * re(lambda)))?;
        let approx = apply_scheme_matrices(&scheme, gens, lambda)?;
        rows.push((lambda, linalg::spectral_norm(&(exact - approx))));
    }
    Ok(rows)
}

/// Commutator bound for the symmetric second-order method:
/// `Delta = sum_{k=1}^{J-1} Delta_2(X_k, X_{k+1} + ... + X_J)` with
/// `Delta_2(A, B) = (1/12) (||[[A,B],B]|| + 1/2 ||[[A,B],A]||)`.
/// The measured phi_2 error is bounded by `lambda^3 * Delta`.
pub fn suzuki_bound(gens: &GeneratorSet) -> f64 {
    let mats = gens.matrices();
    let j = mats.len();
    if j <= 1 {
        return 0.0;
    }
    // suffix sums X_{k+1} + ... + X_J
    let mut suffix = CMat::zeros(gens.size(), gens.size());
    let mut suffixes = vec![suffix.clone(); j];
    for k in (1..j).rev() {
        suffix += &mats[k];
        suffixes[k - 1] = suffix.clone();
    }
    let mut delta = 0.0;
    for k in 0..j - 1 {
        let a = &mats[k];
        let b = &suffixes[k];
        let ab = linalg::commutator(a, b);
        let abb = linalg::commutator(&ab, b);
        let aba = linalg::commutator(&ab, a);
        delta += (linalg::spectral_norm(&abb) + 0.5 * linalg::spectral_norm(&aba)) / 12.0;
    }
    delta
}

/// Pointwise-loop variant of the order study: generators are basis
/// elements scaled by coefficients, errors measured as a sup over a small
/// angle grid. Confirms the order condition carries over from constants to
/// loops.
pub fn order_study_loops(
    coeffs: &BasisCoeffs,
    s: usize,
    lambdas: &[f64],
    grid_len: usize,
) -> Result<f64> {
    let slots = su2::lex_slots(coeffs.m());
    let scheme = build_scheme(s, slots.len());
    let mut points = Vec::with_capacity(lambdas.len());
    let r_loop = su2::reconstruct_from_basis(coeffs)?;
    for &lambda in lambdas {
        let approx = apply_scheme_loops(&scheme, coeffs, lambda)?;
        let mut err = 0.0f64;
        for g in 0..grid_len {
            let t = 2.0 * std::f64::consts::PI * g as f64 / grid_len as f64;
            let exact = linalg::matrix_exp_skew(&(r_loop.eval(t) * re(lambda)))?;
            err = err.max(linalg::spectral_norm(&(exact - approx.eval(t))));
        }
        points.push((lambda, err));
    }
    crate::rates::fit_log_slope(&points)
}

/// A-priori degree bound of `apply_scheme_loops` output: the flattened sum
/// of factor frequencies, before any telescoping.
pub fn scheme_a_priori_degree(scheme: &SplittingScheme, m: usize) -> usize {
    let slots = su2::lex_slots(m);
    scheme.steps.iter().map(|&(j, _)| slots[j].1).sum()
}

/// Exact power of a polynomial loop: sampled at the a-priori bandwidth of
/// the power, multiplied pointwise, analyzed back and trimmed.
pub fn loop_power(base: &TrigMatrixLoop, exponent: usize) -> Result<TrigMatrixLoop> {
    if exponent == 0 {
        return Ok(TrigMatrixLoop::identity(base.size()));
    }
    if exponent == 1 {
        return Ok(base.clone());
    }
    let d_pow = base.degree() * exponent;
    let grid_len = next_pow2(2 * d_pow + 1).max(16);
    let grid = base.sample(grid_len)?;
    let powered = grid.pow(exponent);
    Ok(powered.analyze(d_pow)?.degree_trim(su2::PRODUCT_TRIM_TOL))
}
