//! End-to-end construction of SU(N)-valued polynomial approximants:
//! factorize the input loop, smooth each exponent at the optimal rate,
//! expand in the su(2) basis, split into exponential factors, raise to the
//! M-th power, embed, and assemble — with parameter planning that keeps
//! the final degree under the prescribed budget no matter what.
//!
//! Inputs arrive either pre-factored (constant SU(N) matrices times
//! exponentials of su(2) loops in block embeddings) or as raw samples, in
//! which case the geodesic homotopy `psi(xi) = exp(xi Lambda)` of the
//! pointwise principal logarithm provides the factorization whenever the
//! spectrum stays clear of the branch cut.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::LoopError;
use crate::linalg::{self, CMat};
use crate::loops::{embed_t, next_pow2, GridLoop, LoopClass, TrigMatrixLoop, TRIM_TOL};
use crate::splitting::{self, build_scheme, scheme_for_basis};
use crate::su2::{self, PRODUCT_TRIM_TOL};
use crate::vp;
use crate::Result;

#[inline]
fn re(x: f64) -> Complex<f64> {
    Complex::new(x, 0.0)
}

/// Default bound on the group-distance of consecutive homotopy snapshots.
/// Any value below sqrt(2) keeps every factor inside the principal branch
/// of the logarithm with margin.
pub const DEFAULT_MAX_STEP: f64 = 0.5;

/// Parameters governing one end-to-end run.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ApproxPlan {
    /// Target degree bound.
    pub n: usize,
    pub alpha: f64,
    pub epsilon: f64,
    /// Number of exponential factors L.
    #[serde(rename = "L")]
    pub factor_count: usize,
    /// Splitting half-order: the scheme has order 2s.
    pub s: usize,
    /// Smoothing degree of the per-factor Vallée Poussin mean.
    pub m: usize,
    /// Power/step count M.
    #[serde(rename = "M")]
    pub power_steps: usize,
    pub feasible: bool,
}

impl ApproxPlan {
    /// Per-factor degree budget `12 * 3^{s-1} * M * m`.
    pub fn factor_degree_budget(&self) -> usize {
        if !self.feasible {
            return 0;
        }
        12 * 3usize.pow(self.s as u32 - 1) * self.power_steps * self.m
    }

    /// Total degree budget `12 L 3^{s-1} M m`; at most n when feasible.
    pub fn total_degree_budget(&self) -> usize {
        self.factor_count * self.factor_degree_budget()
    }
}

/// Chooses the splitting half-order and the integers M, m for a target
/// degree n: s is the smallest integer with `alpha^2/(alpha+2s) <= epsilon`
/// (inverting the achieved rate `n^{-alpha + alpha^2/(alpha+2s)}`), M
/// follows the asymptotic formula floored at 1, and m spends the remaining
/// degree budget. When even m = 1 does not fit, the plan is infeasible and
/// the approximation falls back to the constant identity loop.
pub fn plan_parameters(
    n: usize,
    alpha: f64,
    epsilon: f64,
    factor_count: usize,
) -> Result<ApproxPlan> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(LoopError::InvalidParameter(format!(
            "alpha must be finite and > 1, got {alpha}"
        )));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(LoopError::InvalidParameter(format!(
            "epsilon must be finite and > 0, got {epsilon}"
        )));
    }
    if factor_count == 0 {
        return Err(LoopError::InvalidParameter(
            "factor count must be at least 1".into(),
        ));
    }
    let raw_s = (alpha * alpha / epsilon - alpha) / 2.0;
    let s = (raw_s - 1e-9).ceil().max(1.0) as usize;
    let tri = 3usize.pow(s as u32 - 1);
    let unit = 12 * factor_count * tri;
    let power_raw = (n as f64).powf(alpha / (alpha + 2.0 * s as f64)) / unit as f64;
    let power_steps = (power_raw.floor() as usize).max(1);
    let m = n / (unit * power_steps);
    let feasible = m >= 1;
    Ok(ApproxPlan {
        n,
        alpha,
        epsilon,
        factor_count,
        s,
        m,
        power_steps,
        feasible,
    })
}

/// How a factor's exponent sits inside the NxN loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Embedding {
    /// Block embedding into rows/columns (i, j), 1-based, i < j.
    Pair(usize, usize),
    /// The exponent already has full size N.
    Full,
}

/// Exponent loop of one factor, in either representation.
#[derive(Debug, Clone)]
pub enum ExponentLoop {
    Poly(TrigMatrixLoop),
    Grid(GridLoop),
}

impl ExponentLoop {
    pub fn size(&self) -> usize {
        match self {
            ExponentLoop::Poly(l) => l.size(),
            ExponentLoop::Grid(g) => g.size(),
        }
    }

    /// Samples the exponent on a grid of the requested length, going
    /// through an exact analysis step when lengths differ.
    pub fn sample(&self, grid_len: usize) -> Result<GridLoop> {
        match self {
            ExponentLoop::Poly(l) => l.sample(grid_len),
            ExponentLoop::Grid(g) => {
                if g.grid_len() == grid_len {
                    Ok(g.clone())
                } else if g.grid_len() % grid_len == 0 {
                    let stride = g.grid_len() / grid_len;
                    GridLoop::new(
                        g.samples()
                            .iter()
                            .step_by(stride)
                            .cloned()
                            .collect::<Vec<_>>(),
                    )
                } else {
                    let d = (g.grid_len() - 1) / 2;
                    g.analyze(d)?.sample(grid_len)
                }
            }
        }
    }

    /// Vallée Poussin mean of budget m, as a polynomial loop.
    pub fn vp_mean(&self, m: usize) -> Result<TrigMatrixLoop> {
        match self {
            ExponentLoop::Poly(l) => Ok(vp::vp_mean_of_loop(l, m)),
            ExponentLoop::Grid(g) => vp::vp_mean(g, m),
        }
    }
}

/// One factor `U_0 * exp(embedded exponent)`.
#[derive(Debug, Clone)]
pub struct Factor {
    /// Constant SU(N) matrix in front of the exponential.
    pub constant: CMat,
    /// Algebra-valued exponent loop (size 2 for pair embeddings, size N
    /// for full embeddings).
    pub exponent: ExponentLoop,
    pub embedding: Embedding,
}

/// A loop in factored form `prod_l U_{0,l} exp(A_l-hat)`.
#[derive(Debug, Clone)]
pub struct FactoredLoop {
    size: usize,
    factors: Vec<Factor>,
}

impl FactoredLoop {
    /// Validates sizes, embeddings and unitarity of the constants.
    pub fn new(size: usize, factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(LoopError::InvalidParameter(
                "factored loop needs at least one factor".into(),
            ));
        }
        for f in &factors {
            if f.constant.nrows() != size || f.constant.ncols() != size {
                return Err(LoopError::SizeMismatch(f.constant.nrows(), size));
            }
            let udef = linalg::unitarity_defect(&f.constant);
            if udef > 1e-8 {
                return Err(LoopError::NotUnitary {
                    defect: udef,
                    tol: 1e-8,
                });
            }
            match f.embedding {
                Embedding::Pair(i, j) => {
                    if f.exponent.size() != 2 {
                        return Err(LoopError::SizeMismatch(f.exponent.size(), 2));
                    }
                    if i < 1 || j <= i || j > size {
                        return Err(LoopError::BadEmbedding { i, j, n: size });
                    }
                }
                Embedding::Full => {
                    if f.exponent.size() != size {
                        return Err(LoopError::SizeMismatch(f.exponent.size(), size));
                    }
                }
            }
        }
        Ok(Self { size, factors })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    /// Samples the exact value `prod U_0 exp(A-hat)` on a grid.
    pub fn reference_grid(&self, grid_len: usize) -> Result<GridLoop> {
        let mut samples = vec![CMat::identity(self.size, self.size); grid_len];
        for f in &self.factors {
            let exp_grid = f.exponent.sample(grid_len)?.exp()?;
            for (g, acc) in samples.iter_mut().enumerate() {
                let u = match f.embedding {
                    Embedding::Full => exp_grid.samples()[g].clone(),
                    Embedding::Pair(i, j) => {
                        embed_matrix(&exp_grid.samples()[g], i, j, self.size)
                    }
                };
                *acc = &*acc * &f.constant * u;
            }
        }
        GridLoop::new(samples)
    }
}

/// Group embedding of a 2x2 matrix into rows/columns (i, j) of the NxN
/// identity (the pointwise counterpart of [`embed_t`]).
fn embed_matrix(a: &CMat, i: usize, j: usize, n: usize) -> CMat {
    let mut out = CMat::identity(n, n);
    let (ri, rj) = (i - 1, j - 1);
    out[(ri, ri)] = a[(0, 0)];
    out[(ri, rj)] = a[(0, 1)];
    out[(rj, ri)] = a[(1, 0)];
    out[(rj, rj)] = a[(1, 1)];
    out
}

/// Factorizes a sampled SU(N) loop through the geodesic homotopy
/// `psi(xi)(t) = exp(xi Lambda(t))` of its pointwise principal logarithm.
///
/// The uniform partition size `K = ceil(sup_t ||Lambda(t)|| / theta)` with
/// `theta = 2 asin(max_step / 2)` keeps consecutive snapshots within
/// `max_step` of each other in the sup norm, so each quotient
/// `psi(xi_{k-1})^H psi(xi_k) = exp(Lambda / K)` stays inside the
/// principal branch. Fails with the branch-cut error when any sample has
/// an eigenvalue too close to -1.
pub fn homotopy_factorize(u: &GridLoop, max_step: f64) -> Result<FactoredLoop> {
    if !(max_step > 0.0 && max_step < std::f64::consts::SQRT_2) {
        return Err(LoopError::InvalidParameter(format!(
            "max_step must lie in (0, sqrt(2)), got {max_step}"
        )));
    }
    let lambda = u.log()?;
    let sup = lambda.sup_norm();
    let theta = 2.0 * (max_step / 2.0).asin();
    let k = ((sup / theta).ceil() as usize).max(1);
    let scale = re(1.0 / k as f64);
    let step_samples: Vec<CMat> = lambda.samples().iter().map(|s| s * scale).collect();
    let step = GridLoop::new(step_samples)?;
    let factors = (0..k)
        .map(|_| Factor {
            constant: CMat::identity(u.size(), u.size()),
            exponent: ExponentLoop::Grid(step.clone()),
            embedding: Embedding::Full,
        })
        .collect();
    FactoredLoop::new(u.size(), factors)
}

/// Approximates `exp(A)` for a size-2 algebra-valued exponent by the full
/// smoothing + splitting + powering chain:
/// `P = phi_{2s}({c_{r,k} B_{r,k} / M})^M` with the coefficients of the
/// degree-m Vallée Poussin mean of A. The result is SU(2)-valued and its
/// degree is capped at the plan's per-factor budget.
pub fn approximate_factor(a: &ExponentLoop, plan: &ApproxPlan) -> Result<TrigMatrixLoop> {
    if !plan.feasible {
        return Err(LoopError::InfeasiblePlan(format!(
            "n = {} leaves no degree budget (m = 0)",
            plan.n
        )));
    }
    if a.size() != 2 {
        return Err(LoopError::SizeMismatch(a.size(), 2));
    }
    let smoothed = a.vp_mean(plan.m)?;
    let coeffs = su2::expand_in_basis(&smoothed, plan.m)?;
    let scheme = scheme_for_basis(plan.s, plan.m);
    let lambda = 1.0 / plan.power_steps as f64;
    let base = splitting::apply_scheme_loops(&scheme, &coeffs, lambda)?;
    let powered = splitting::loop_power(&base, plan.power_steps)?;
    Ok(powered.truncate(plan.factor_degree_budget()))
}

/// Orthonormal skew-Hermitian basis of su(N) (Frobenius inner product):
/// antisymmetric pairs, i-symmetric pairs, and i-diagonal generators.
pub fn sun_skew_basis(n: usize) -> Vec<CMat> {
    let mut basis = Vec::with_capacity(n * n - 1);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for p in 0..n {
        for q in (p + 1)..n {
            let mut s = CMat::zeros(n, n);
            s[(p, q)] = re(inv_sqrt2);
            s[(q, p)] = re(-inv_sqrt2);
            basis.push(s);
            let mut t = CMat::zeros(n, n);
            t[(p, q)] = Complex::new(0.0, inv_sqrt2);
            t[(q, p)] = Complex::new(0.0, inv_sqrt2);
            basis.push(t);
        }
    }
    for r in 1..n {
        let norm = 1.0 / ((r * (r + 1)) as f64).sqrt();
        let mut d = CMat::zeros(n, n);
        for p in 0..r {
            d[(p, p)] = Complex::new(0.0, norm);
        }
        d[(r, r)] = Complex::new(0.0, -(r as f64) * norm);
        basis.push(d);
    }
    basis
}

/// Full-size variant of [`approximate_factor`] for su(N) exponents with
/// N > 2 (the homotopy route). The smoothed exponent splits across the
/// N^2-1 constant-direction generator loops `a_p(t) E_p`; each splitting
/// factor is an exact pointwise exponential (one eigendecomposition per
/// direction), and the degree budget is enforced by measurement: analysis
/// at the budget bandwidth followed by the roundoff trim.
pub fn approximate_factor_full(
    a: &ExponentLoop,
    plan: &ApproxPlan,
    degree_budget: usize,
) -> Result<TrigMatrixLoop> {
    if !plan.feasible {
        return Err(LoopError::InfeasiblePlan(format!(
            "n = {} leaves no degree budget (m = 0)",
            plan.n
        )));
    }
    let n = a.size();
    let smoothed = a.vp_mean(plan.m)?;
    let basis = sun_skew_basis(n);
    let directions: Vec<(CMat, nalgebra::DVector<f64>)> = basis
        .iter()
        .map(|e| {
            let h = e.map(|z| Complex::new(0.0, -1.0) * z);
            let se = nalgebra::SymmetricEigen::new(h);
            (se.eigenvectors, se.eigenvalues)
        })
        .collect();

    let grid_len = next_pow2(2 * degree_budget + 1).max(512);
    let smoothed_grid = smoothed.sample(grid_len)?;
    // scalar direction components a_p(t) = Re tr(E_p^H R(t))
    let components: Vec<Vec<f64>> = basis
        .iter()
        .map(|e| {
            let eh = e.adjoint();
            smoothed_grid
                .samples()
                .iter()
                .map(|s| (&eh * s).trace().re)
                .collect()
        })
        .collect();

    let scheme = build_scheme(plan.s, basis.len());
    let lambda = 1.0 / plan.power_steps as f64;
    let mut samples = vec![CMat::identity(n, n); grid_len];
    for &(j, w) in scheme.steps() {
        let (v, mu) = &directions[j];
        let vh = v.adjoint();
        for (g, acc) in samples.iter_mut().enumerate() {
            let theta = lambda * w * components[j][g];
            let phases = nalgebra::DVector::from_iterator(
                n,
                mu.iter().map(|&l| {
                    let ang = l * theta;
                    Complex::new(ang.cos(), ang.sin())
                }),
            );
            *acc = &*acc * v * CMat::from_diagonal(&phases) * &vh;
        }
    }
    let base = GridLoop::new(samples)?;
    let powered = base.pow(plan.power_steps);
    // The exponential factors are not bandlimited; their Fourier tails
    // decay superexponentially, so analysis at the budget bandwidth folds
    // in only a negligible alias.
    Ok(powered.analyze(degree_budget)?.degree_trim(PRODUCT_TRIM_TOL))
}

/// Assembles per-factor polynomial approximants into the full loop
/// `prod_l U_{0,l} * embed(P_l)`. The degree is at most the sum of the
/// per-factor degrees.
pub fn assemble(
    factored: &FactoredLoop,
    per_factor: &[TrigMatrixLoop],
) -> Result<TrigMatrixLoop> {
    if factored.factor_count() != per_factor.len() {
        return Err(LoopError::InvalidParameter(format!(
            "{} factors but {} approximants",
            factored.factor_count(),
            per_factor.len()
        )));
    }
    let n = factored.size();
    let mut acc = TrigMatrixLoop::identity(n);
    for (f, p) in factored.factors().iter().zip(per_factor) {
        let embedded = match f.embedding {
            Embedding::Pair(i, j) => {
                if p.size() != 2 {
                    return Err(LoopError::SizeMismatch(p.size(), 2));
                }
                embed_t(p, i, j, n)?
            }
            Embedding::Full => {
                if p.size() != n {
                    return Err(LoopError::SizeMismatch(p.size(), n));
                }
                p.clone()
            }
        };
        acc = acc
            .multiply(&TrigMatrixLoop::constant(f.constant.clone()))?
            .multiply(&embedded)?;
    }
    Ok(acc.degree_trim(PRODUCT_TRIM_TOL))
}

/// Input form accepted by [`approximate_loop`].
#[derive(Debug, Clone)]
pub enum LoopInput {
    Factored(FactoredLoop),
    Grid(GridLoop),
}

/// Measured outcome of one end-to-end run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApproxReport {
    /// Target degree bound of the run.
    pub n: usize,
    pub plan: ApproxPlan,
    /// Sup distance between the approximant and the reference samples.
    pub sup_error: f64,
    /// Degree of the returned loop after the reporting trim.
    pub degree: usize,
    pub unitarity_defect: f64,
    pub det_defect: f64,
    /// Per-factor sup errors `||exp(A_l) - P_l||_C`.
    pub per_factor_errors: Vec<f64>,
    /// Whether `sup_error <= L * max_l per-factor error * (1 + 1e-9)`.
    pub factor_law_ok: bool,
}

/// Grid length used for defect certification.
pub const DEFECT_GRID: usize = 4096;

/// Runs the full chain: factorize (if the input is raw samples), plan,
/// approximate each factor, assemble, and measure. An infeasible plan
/// falls back to the constant identity loop, whose error never exceeds
/// the trivial bound 2.
pub fn approximate_loop(
    input: &LoopInput,
    n: usize,
    alpha: f64,
    epsilon: f64,
) -> Result<(TrigMatrixLoop, ApproxReport)> {
    let factored = match input {
        LoopInput::Factored(f) => f.clone(),
        LoopInput::Grid(g) => homotopy_factorize(g, DEFAULT_MAX_STEP)?,
    };
    let size = factored.size();
    let plan = plan_parameters(n, alpha, epsilon, factored.factor_count())?;

    let ref_len = next_pow2(2 * n + 2).max(DEFECT_GRID);
    let reference = factored.reference_grid(ref_len)?;

    if !plan.feasible {
        let p = TrigMatrixLoop::identity(size);
        let sup_error = crate::loops::sup_distance_grid_loop(&reference, &p)?;
        let report = ApproxReport {
            n,
            plan,
            sup_error,
            degree: 0,
            unitarity_defect: 0.0,
            det_defect: 0.0,
            per_factor_errors: Vec::new(),
            factor_law_ok: true,
        };
        return Ok((p, report));
    }

    let mut per_factor = Vec::with_capacity(factored.factor_count());
    let mut per_factor_errors = Vec::with_capacity(factored.factor_count());
    let full_budget = n / factored.factor_count();
    for f in factored.factors() {
        let p = match f.embedding {
            Embedding::Pair(_, _) => approximate_factor(&f.exponent, &plan)?,
            Embedding::Full => {
                if size == 2 {
                    approximate_factor(&f.exponent, &plan)?
                } else {
                    approximate_factor_full(&f.exponent, &plan, full_budget)?
                }
            }
        };
        let exp_grid = f.exponent.sample(ref_len)?.exp()?;
        let p_grid = p.sample(ref_len)?;
        let err = exp_grid.sup_distance(&p_grid)?;
        per_factor_errors.push(err);
        per_factor.push(p);
    }

    let assembled = assemble(&factored, &per_factor)?;
    let trimmed = assembled.degree_trim(TRIM_TOL);
    assert!(
        trimmed.degree() <= n,
        "degree guarantee violated: {} > {}",
        trimmed.degree(),
        n
    );

    let sup_error = crate::loops::sup_distance_grid_loop(&reference, &assembled)?;
    let defect_len = DEFECT_GRID.max(next_pow2(2 * assembled.degree() + 1));
    let class = assembled
        .sample(defect_len)?
        .classify(LoopClass::UnitaryGroup);
    let max_factor_err = per_factor_errors.iter().cloned().fold(0.0, f64::max);
    let factor_law_ok =
        sup_error <= factored.factor_count() as f64 * max_factor_err * (1.0 + 1e-9) + 1e-14;

    let report = ApproxReport {
        n,
        plan,
        sup_error,
        degree: trimmed.degree(),
        unitarity_defect: class.max_unitarity_defect,
        det_defect: class.max_det_defect,
        per_factor_errors,
        factor_law_ok,
    };
    Ok((assembled, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vp::{synth_lip_su_loop, SmoothnessSpec};

    fn synthetic_factored_su2(
        alpha: f64,
        amplitude: f64,
        seed: u64,
        max_degree: usize,
    ) -> FactoredLoop {
        let a = synth_lip_su_loop(
            &SmoothnessSpec {
                alpha,
                amplitude,
                seed,
                max_degree,
            },
            2,
        );
        FactoredLoop::new(
            2,
            vec![Factor {
                constant: CMat::identity(2, 2),
                exponent: ExponentLoop::Poly(a),
                embedding: Embedding::Pair(1, 2),
            }],
        )
        .unwrap()
    }

    #[test]
    fn plan_matches_worked_example() {
        // n = 1024, alpha = 2, epsilon = 1 -> s = 1, M = 2, m = 42
        let plan = plan_parameters(1024, 2.0, 1.0, 1).unwrap();
        assert_eq!(plan.s, 1);
        assert_eq!(plan.power_steps, 2);
        assert_eq!(plan.m, 42);
        assert!(plan.feasible);
        assert_eq!(plan.total_degree_budget(), 1008);
        assert!(plan.total_degree_budget() <= 1024);
    }

    #[test]
    fn plan_epsilon_rule() {
        // alpha = 2, epsilon = 0.5: 4/(2+2s) <= 0.5 first at s = 3
        let plan = plan_parameters(4096, 2.0, 0.5, 1).unwrap();
        assert_eq!(plan.s, 3);
        // boundary case epsilon = 1 gives s = 1 exactly
        assert_eq!(plan_parameters(4096, 2.0, 1.0, 1).unwrap().s, 1);
    }

    #[test]
    fn plan_small_n_is_infeasible() {
        let plan = plan_parameters(4, 2.0, 0.5, 1).unwrap();
        assert!(!plan.feasible);
        assert_eq!(plan.m, 0);
    }

    #[test]
    fn plan_rejects_bad_parameters() {
        assert!(plan_parameters(100, 0.5, 1.0, 1).is_err());
        assert!(plan_parameters(100, 2.0, 0.0, 1).is_err());
        assert!(plan_parameters(100, 2.0, 1.0, 0).is_err());
    }

    #[test]
    fn plan_degree_budget_always_within_n() {
        for n in [16usize, 100, 333, 1000, 5000] {
            for alpha in [1.5, 2.0, 3.0] {
                for eps in [0.3, 0.5, 1.0] {
                    let plan = plan_parameters(n, alpha, eps, 3).unwrap();
                    if plan.feasible {
                        assert!(plan.total_degree_budget() <= n, "n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn homotopy_of_identity_is_single_zero_factor() {
        let u = GridLoop::from_fn(2, 64, |_| CMat::identity(2, 2)).unwrap();
        let f = homotopy_factorize(&u, 0.5).unwrap();
        assert_eq!(f.factor_count(), 1);
        match &f.factors()[0].exponent {
            ExponentLoop::Grid(g) => assert!(g.sup_norm() < 1e-12),
            _ => panic!("expected grid exponent"),
        }
    }

    #[test]
    fn homotopy_small_loop_single_factor() {
        let a = synth_lip_su_loop(
            &SmoothnessSpec {
                alpha: 2.0,
                amplitude: 0.2,
                seed: 5,
                max_degree: 8,
            },
            2,
        );
        // ||A||_C <= sum ||C_k|| < 0.4 keeps K = 1 at max_step 0.5
        let u = a.sample(128).unwrap().exp().unwrap();
        let f = homotopy_factorize(&u, 0.5).unwrap();
        assert_eq!(f.factor_count(), 1);
        let back = match &f.factors()[0].exponent {
            ExponentLoop::Grid(g) => g.clone(),
            _ => panic!(),
        };
        let direct = a.sample(128).unwrap();
        assert!(back.sup_distance(&direct).unwrap() < 1e-10);
    }

    #[test]
    fn homotopy_reconstruction_matches_input() {
        for seed in [1u64, 2, 3] {
            let a = synth_lip_su_loop(
                &SmoothnessSpec {
                    alpha: 2.0,
                    amplitude: 0.8,
                    seed,
                    max_degree: 12,
                },
                3,
            );
            let u = a.sample(256).unwrap().exp().unwrap();
            let f = homotopy_factorize(&u, 0.5).unwrap();
            let rec = f.reference_grid(256).unwrap();
            assert!(
                rec.sup_distance(&u).unwrap() < 1e-9,
                "seed {seed}: reconstruction defect too large"
            );
        }
    }

    #[test]
    fn homotopy_rejects_branch_cut() {
        // diag(e^{it}, e^{-it}) hits -1 at the t = pi grid point
        let mut l = TrigMatrixLoop::zeros(2, 1);
        l.coeff_mut(1)[(0, 0)] = re(1.0);
        l.coeff_mut(-1)[(1, 1)] = re(1.0);
        let u = l.sample(64).unwrap();
        assert!(matches!(
            homotopy_factorize(&u, 0.5),
            Err(LoopError::BranchCut { .. })
        ));
    }

    #[test]
    fn homotopy_rejects_bad_max_step() {
        let u = GridLoop::from_fn(2, 16, |_| CMat::identity(2, 2)).unwrap();
        assert!(homotopy_factorize(&u, 0.0).is_err());
        assert!(homotopy_factorize(&u, 1.5).is_err());
    }

    #[test]
    fn homotopy_partitions_large_loops() {
        let a = synth_lip_su_loop(
            &SmoothnessSpec {
                alpha: 3.0,
                amplitude: 1.2,
                seed: 9,
                max_degree: 8,
            },
            2,
        );
        let u = a.sample(128).unwrap().exp().unwrap();
        let f = homotopy_factorize(&u, 0.5).unwrap();
        assert!(f.factor_count() >= 2);
        let rec = f.reference_grid(128).unwrap();
        assert!(rec.sup_distance(&u).unwrap() < 1e-9);
    }

    #[test]
    fn approximate_factor_of_zero_is_identity() {
        let zero = TrigMatrixLoop::zeros(2, 2);
        let plan = plan_parameters(256, 2.0, 1.0, 1).unwrap();
        let p = approximate_factor(&ExponentLoop::Poly(zero), &plan).unwrap();
        let id = TrigMatrixLoop::identity(2);
        assert!(p.sup_distance(&id, 64).unwrap() < 1e-12);
    }

    #[test]
    fn approximate_factor_constant_axis_exponent() {
        // A = 0.3 X3 constant: single generator, splitting is exact
        let a = TrigMatrixLoop::constant(&crate::su2::axis_x3() * re(0.3));
        let mut plan = plan_parameters(256, 2.0, 1.0, 1).unwrap();
        plan.power_steps = 4;
        plan.m = 1;
        let p = approximate_factor(&ExponentLoop::Poly(a.clone()), &plan).unwrap();
        let exact_grid = a.sample(64).unwrap().exp().unwrap();
        let err = crate::loops::sup_distance_grid_loop(&exact_grid, &p).unwrap();
        assert!(err < 1e-8, "constant-exponent error {err}");
    }

    #[test]
    fn approximate_factor_respects_budget_and_class() {
        let f = synthetic_factored_su2(2.0, 0.4, 11, 64);
        let plan = plan_parameters(512, 2.0, 1.0, 1).unwrap();
        let p = approximate_factor(&f.factors()[0].exponent, &plan).unwrap();
        assert!(p.degree() <= plan.factor_degree_budget());
        let report = p.classify(LoopClass::UnitaryGroup);
        assert!(report.max_unitarity_defect < 1e-10);
    }

    #[test]
    fn assemble_single_identity_embedding() {
        let f = synthetic_factored_su2(2.0, 0.4, 13, 16);
        let plan = plan_parameters(256, 2.0, 1.0, 1).unwrap();
        let p = approximate_factor(&f.factors()[0].exponent, &plan).unwrap();
        let assembled = assemble(&f, &[p.clone()]).unwrap();
        assert!(assembled.sup_distance(&p, 512).unwrap() < 1e-11);
    }

    #[test]
    fn assemble_exact_factors_reconstructs() {
        // P_l = analyzed exp(A_l): assembly must match the reference
        let a1 = synth_lip_su_loop(
            &SmoothnessSpec {
                alpha: 2.0,
                amplitude: 0.5,
                seed: 21,
                max_degree: 6,
            },
            2,
        );
        let a2 = synth_lip_su_loop(
            &SmoothnessSpec {
                alpha: 2.0,
                amplitude: 0.5,
                seed: 22,
                max_degree: 6,
            },
            2,
        );
        let factored = FactoredLoop::new(
            3,
            vec![
                Factor {
                    constant: CMat::identity(3, 3),
                    exponent: ExponentLoop::Poly(a1.clone()),
                    embedding: Embedding::Pair(1, 2),
                },
                Factor {
                    constant: CMat::identity(3, 3),
                    exponent: ExponentLoop::Poly(a2.clone()),
                    embedding: Embedding::Pair(1, 3),
                },
            ],
        )
        .unwrap();
        let exact: Vec<TrigMatrixLoop> = [&a1, &a2]
            .iter()
            .map(|a| a.sample(256).unwrap().exp().unwrap().analyze(100).unwrap())
            .collect();
        let assembled = assemble(&factored, &exact).unwrap();
        let reference = factored.reference_grid(512).unwrap();
        let err = crate::loops::sup_distance_grid_loop(&reference, &assembled).unwrap();
        assert!(err < 1e-9, "reconstruction defect {err}");
    }

    #[test]
    fn approximate_loop_self_approximation() {
        // input already a low-degree exponential: error small, degree <= n
        let input = LoopInput::Factored(synthetic_factored_su2(2.0, 0.3, 31, 12));
        let (p, report) = approximate_loop(&input, 1024, 2.0, 1.0).unwrap();
        assert!(report.degree <= 1024);
        assert!(report.sup_error < 0.05, "sup error {}", report.sup_error);
        assert!(report.unitarity_defect < 1e-9);
        assert!(report.det_defect < 1e-9);
        assert!(report.factor_law_ok);
        assert_eq!(p.degree_trim(TRIM_TOL).degree(), report.degree);
    }

    #[test]
    fn approximate_loop_infeasible_falls_back_to_identity() {
        let input = LoopInput::Factored(synthetic_factored_su2(2.0, 0.5, 32, 8));
        let (p, report) = approximate_loop(&input, 4, 2.0, 0.5).unwrap();
        assert_eq!(p.degree(), 0);
        assert!(!report.plan.feasible);
        assert!(report.sup_error <= 2.0 + 1e-12);
    }

    #[test]
    fn approximate_loop_grid_input_n3() {
        let a = synth_lip_su_loop(
            &SmoothnessSpec {
                alpha: 2.0,
                amplitude: 0.4,
                seed: 41,
                max_degree: 8,
            },
            3,
        );
        let u = a.sample(512).unwrap().exp().unwrap();
        let (p, report) = approximate_loop(&LoopInput::Grid(u), 256, 2.0, 1.0).unwrap();
        assert!(report.degree <= 256);
        assert!(
            report.unitarity_defect < 1e-9,
            "unitarity {}",
            report.unitarity_defect
        );
        assert!(report.det_defect < 1e-9);
        assert!(report.sup_error < 0.5);
        assert_eq!(p.size(), 3);
    }

    #[test]
    fn sun_basis_is_orthonormal_and_skew() {
        for n in [2usize, 3, 4] {
            let basis = sun_skew_basis(n);
            assert_eq!(basis.len(), n * n - 1);
            for (i, a) in basis.iter().enumerate() {
                assert!(linalg::skew_defect(a) < 1e-14);
                assert!(a.trace().norm() < 1e-14);
                for (j, b) in basis.iter().enumerate() {
                    let ip = (a.adjoint() * b).trace();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((ip.re - expected).abs() < 1e-13);
                    assert!(ip.im.abs() < 1e-13);
                }
            }
        }
    }
}
