//! Matrix-valued trigonometric-polynomial loops and their exact arithmetic.
//!
//! A [`TrigMatrixLoop`] stores the Fourier coefficients `C_k` of
//! `U(t) = sum_{k=-d..d} C_k e^{ikt}` as dense complex blocks; it is the
//! universal representation for every loop this crate manipulates
//! (group-valued approximants and algebra-valued exponents alike). A
//! [`GridLoop`] is the sampled form on a uniform grid of the circle and is
//! the measurement/input side of the same object: `analyze` and
//! `synthesize` convert between the two exactly (to roundoff) whenever the
//! grid is long enough to avoid aliasing.

use rustfft::FftPlanner;

use crate::error::LoopError;
use crate::linalg::{self, C64, CMat};
use crate::Result;

/// Default relative tolerance separating true degree structure from
/// roundoff when trimming.
pub const TRIM_TOL: f64 = 1e-10;

/// Smallest power of two >= x.
pub fn next_pow2(x: usize) -> usize {
    x.max(1).next_power_of_two()
}

/// Grid length used to realize the sup norm over the circle for loops of
/// the given degree: bandlimited functions cannot hide sup-norm spikes
/// between the points of a grid this fine.
pub fn norm_grid_len(degree: usize) -> usize {
    next_pow2(8 * (degree + 1)).max(64)
}

/// Matrix-valued trigonometric polynomial on the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigMatrixLoop {
    size: usize,
    degree: usize,
    /// Coefficient blocks for k = -degree ..= degree, stored low to high.
    coeffs: Vec<CMat>,
}

impl TrigMatrixLoop {
    /// Zero loop of the given size and degree.
    pub fn zeros(size: usize, degree: usize) -> Self {
        Self {
            size,
            degree,
            coeffs: vec![CMat::zeros(size, size); 2 * degree + 1],
        }
    }

    /// Constant loop (degree 0).
    pub fn constant(value: CMat) -> Self {
        let size = value.nrows();
        assert_eq!(size, value.ncols(), "constant loop needs a square matrix");
        Self {
            size,
            degree: 0,
            coeffs: vec![value],
        }
    }

    /// Constant identity loop.
    pub fn identity(size: usize) -> Self {
        Self::constant(CMat::identity(size, size))
    }

    /// Builds a loop from coefficient blocks for k = -d..=d (length 2d+1).
    pub fn from_coeffs(size: usize, coeffs: Vec<CMat>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() % 2 == 0 {
            return Err(LoopError::BadFile(format!(
                "coefficient list must have odd length 2d+1, got {}",
                coeffs.len()
            )));
        }
        for c in &coeffs {
            if c.nrows() != size || c.ncols() != size {
                return Err(LoopError::SizeMismatch(c.nrows(), size));
            }
        }
        let degree = (coeffs.len() - 1) / 2;
        Ok(Self {
            size,
            degree,
            coeffs,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient block `C_k`; zero when |k| exceeds the degree.
    pub fn coeff(&self, k: i64) -> CMat {
        let d = self.degree as i64;
        if k.abs() > d {
            CMat::zeros(self.size, self.size)
        } else {
            self.coeffs[(k + d) as usize].clone()
        }
    }

    /// Mutable access to coefficient block `C_k`. Panics if |k| > degree.
    pub fn coeff_mut(&mut self, k: i64) -> &mut CMat {
        let d = self.degree as i64;
        assert!(k.abs() <= d, "coefficient index out of range");
        &mut self.coeffs[(k + d) as usize]
    }

    /// All coefficient blocks, k ascending from -degree to degree.
    pub fn coeffs(&self) -> &[CMat] {
        &self.coeffs
    }

    /// Evaluates `sum_k C_k e^{ikt}`.
    pub fn eval(&self, t: f64) -> CMat {
        let d = self.degree as i64;
        let step = C64::new(t.cos(), t.sin());
        // phase = e^{i(-d)t}, then multiply up.
        let mut phase = C64::new((-(d as f64) * t).cos(), (-(d as f64) * t).sin());
        let mut acc = CMat::zeros(self.size, self.size);
        for c in &self.coeffs {
            acc.zip_apply(c, |a, b| *a += b * phase);
            phase *= step;
        }
        acc
    }

    /// Pointwise product of two loops; coefficients are the convolution of
    /// the inputs, so the degree adds (before trimming).
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.size != other.size {
            return Err(LoopError::SizeMismatch(self.size, other.size));
        }
        let d = self.degree + other.degree;
        let mut out = Self::zeros(self.size, d);
        let da = self.degree as i64;
        let db = other.degree as i64;
        for (ia, a) in self.coeffs.iter().enumerate() {
            let ka = ia as i64 - da;
            for (ib, b) in other.coeffs.iter().enumerate() {
                let kb = ib as i64 - db;
                let prod = a * b;
                *out.coeff_mut(ka + kb) += prod;
            }
        }
        Ok(out)
    }

    /// Sum of two loops.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.size != other.size {
            return Err(LoopError::SizeMismatch(self.size, other.size));
        }
        let d = self.degree.max(other.degree);
        let mut out = Self::zeros(self.size, d);
        for k in -(d as i64)..=(d as i64) {
            *out.coeff_mut(k) = self.coeff(k) + other.coeff(k);
        }
        Ok(out)
    }

    /// Scales every coefficient by a real factor.
    pub fn scale(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= C64::new(factor, 0.0);
        }
        out
    }

    /// Pointwise adjoint loop `t -> U(t)^H` (coefficient at k becomes `C_{-k}^H`).
    pub fn adjoint_loop(&self) -> Self {
        let d = self.degree as i64;
        let coeffs = (-d..=d).map(|k| self.coeff(-k).adjoint()).collect();
        Self {
            size: self.size,
            degree: self.degree,
            coeffs,
        }
    }

    /// Largest coefficient spectral norm.
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(linalg::spectral_norm)
            .fold(0.0, f64::max)
    }

    /// Drops leading/trailing coefficient blocks whose spectral norm is at
    /// most `rel_tol` times the largest coefficient norm, so the reported
    /// degree is tight.
    pub fn degree_trim(&self, rel_tol: f64) -> Self {
        let scale = self.max_coeff_norm();
        let cut = rel_tol * scale;
        let d = self.degree as i64;
        let mut new_d = 0i64;
        for k in 1..=d {
            let hi = linalg::spectral_norm(&self.coeff(k));
            let lo = linalg::spectral_norm(&self.coeff(-k));
            if hi > cut || lo > cut {
                new_d = k;
            }
        }
        let coeffs = (-new_d..=new_d).map(|k| self.coeff(k)).collect();
        Self {
            size: self.size,
            degree: new_d as usize,
            coeffs,
        }
    }

    /// Truncates hard to the given degree, discarding higher coefficients.
    pub fn truncate(&self, degree: usize) -> Self {
        if degree >= self.degree {
            return self.clone();
        }
        let d = degree as i64;
        let coeffs = (-d..=d).map(|k| self.coeff(k)).collect();
        Self {
            size: self.size,
            degree,
            coeffs,
        }
    }

    /// Samples the loop on a uniform grid of length `grid_len` (a power of
    /// two with `grid_len >= 2*degree+1`) via an inverse FFT per entry.
    pub fn sample(&self, grid_len: usize) -> Result<GridLoop> {
        if grid_len < 2 * self.degree + 1 {
            return Err(LoopError::Aliasing {
                grid: grid_len,
                degree: self.degree,
            });
        }
        let g = grid_len;
        let n = self.size;
        let mut planner = FftPlanner::<f64>::new();
        let ifft = planner.plan_fft_inverse(g);
        let mut samples = vec![CMat::zeros(n, n); g];
        let d = self.degree as i64;
        let mut buf = vec![C64::new(0.0, 0.0); g];
        for row in 0..n {
            for col in 0..n {
                buf.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
                for k in -d..=d {
                    let bin = k.rem_euclid(g as i64) as usize;
                    buf[bin] = self.coeffs[(k + d) as usize][(row, col)];
                }
                ifft.process(&mut buf);
                // rustfft's inverse is unnormalized, which is exactly the
                // plain synthesis sum sum_k C_k e^{ikt_g}.
                for (s, z) in samples.iter_mut().zip(buf.iter()) {
                    s[(row, col)] = *z;
                }
            }
        }
        GridLoop::new(samples)
    }

    /// Sup distance to another loop, measured on a `grid_len` grid.
    pub fn sup_distance(&self, other: &Self, grid_len: usize) -> Result<f64> {
        let a = self.sample(grid_len)?;
        let b = other.sample(grid_len)?;
        a.sup_distance(&b)
    }

    /// Sup norm over the circle on the default norm grid.
    pub fn sup_norm(&self) -> f64 {
        let g = norm_grid_len(self.degree);
        let grid = self.sample(g).expect("norm grid long enough");
        grid.sup_norm()
    }

    /// Structural defects of the loop as a group- or algebra-valued map.
    pub fn classify(&self, class: LoopClass) -> LoopClassReport {
        let g = next_pow2(4 * (self.degree + 1)).max(64);
        self.sample(g)
            .expect("classification grid long enough")
            .classify(class)
    }
}

/// Loop sampled on a uniform grid `t_g = 2 pi g / G`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridLoop {
    size: usize,
    samples: Vec<CMat>,
}

impl GridLoop {
    /// Wraps samples taken at `t_g = 2 pi g / G`; the grid length must be a
    /// power of two.
    pub fn new(samples: Vec<CMat>) -> Result<Self> {
        let g = samples.len();
        if g == 0 || !g.is_power_of_two() {
            return Err(LoopError::InvalidParameter(format!(
                "grid length must be a nonzero power of two, got {g}"
            )));
        }
        let size = samples[0].nrows();
        for s in &samples {
            if s.nrows() != size || s.ncols() != size {
                return Err(LoopError::SizeMismatch(s.nrows(), size));
            }
        }
        Ok(Self { size, samples })
    }

    /// Samples a function of the angle on a power-of-two grid.
    pub fn from_fn(size: usize, grid_len: usize, f: impl Fn(f64) -> CMat) -> Result<Self> {
        let samples = (0..grid_len)
            .map(|g| {
                let t = 2.0 * std::f64::consts::PI * g as f64 / grid_len as f64;
                let m = f(t);
                debug_assert_eq!(m.nrows(), size);
                m
            })
            .collect();
        Self::new(samples)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn grid_len(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[CMat] {
        &self.samples
    }

    /// Discrete Fourier analysis to the loop of the given target degree.
    /// Exact (to roundoff) when the samples come from a loop of degree
    /// <= `target_degree` and the grid has `G >= 2*target_degree + 1`.
    pub fn analyze(&self, target_degree: usize) -> Result<TrigMatrixLoop> {
        let g = self.grid_len();
        if g < 2 * target_degree + 1 {
            return Err(LoopError::Aliasing {
                grid: g,
                degree: target_degree,
            });
        }
        let n = self.size;
        let d = target_degree as i64;
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(g);
        let mut out = TrigMatrixLoop::zeros(n, target_degree);
        let mut buf = vec![C64::new(0.0, 0.0); g];
        let inv_g = 1.0 / g as f64;
        for row in 0..n {
            for col in 0..n {
                for (z, s) in buf.iter_mut().zip(self.samples.iter()) {
                    *z = s[(row, col)];
                }
                fft.process(&mut buf);
                for k in -d..=d {
                    let bin = k.rem_euclid(g as i64) as usize;
                    out.coeff_mut(k)[(row, col)] = buf[bin] * inv_g;
                }
            }
        }
        Ok(out)
    }

    /// Max over the grid of the spectral norm of the pointwise difference.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        if self.size != other.size {
            return Err(LoopError::SizeMismatch(self.size, other.size));
        }
        if self.grid_len() != other.grid_len() {
            return Err(LoopError::InvalidParameter(format!(
                "grid length mismatch: {} vs {}",
                self.grid_len(),
                other.grid_len()
            )));
        }
        Ok(self
            .samples
            .iter()
            .zip(other.samples.iter())
            .map(|(a, b)| linalg::spectral_norm(&(a - b)))
            .fold(0.0, f64::max))
    }

    /// Pointwise product of two grids of equal size and length.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.size != other.size {
            return Err(LoopError::SizeMismatch(self.size, other.size));
        }
        if self.grid_len() != other.grid_len() {
            return Err(LoopError::InvalidParameter(format!(
                "grid length mismatch: {} vs {}",
                self.grid_len(),
                other.grid_len()
            )));
        }
        let samples = self
            .samples
            .iter()
            .zip(other.samples.iter())
            .map(|(a, b)| a * b)
            .collect();
        Self::new(samples)
    }

    /// Pointwise integer power.
    pub fn pow(&self, exponent: usize) -> Self {
        let samples = self
            .samples
            .iter()
            .map(|s| {
                let mut acc = CMat::identity(self.size, self.size);
                for _ in 0..exponent {
                    acc = &acc * s;
                }
                acc
            })
            .collect();
        Self {
            size: self.size,
            samples,
        }
    }

    /// Pointwise exponential of an algebra-valued grid.
    pub fn exp(&self) -> Result<Self> {
        let samples = self
            .samples
            .iter()
            .map(linalg::matrix_exp_skew)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            size: self.size,
            samples,
        })
    }

    /// Pointwise principal logarithm of a unitary-valued grid.
    pub fn log(&self) -> Result<Self> {
        let samples = self
            .samples
            .iter()
            .map(linalg::matrix_log_principal)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            size: self.size,
            samples,
        })
    }

    /// Max spectral norm over the grid.
    pub fn sup_norm(&self) -> f64 {
        self.samples
            .iter()
            .map(linalg::spectral_norm)
            .fold(0.0, f64::max)
    }

    /// Structural defects of the sampled loop.
    pub fn classify(&self, class: LoopClass) -> LoopClassReport {
        let mut report = LoopClassReport::default();
        for s in &self.samples {
            match class {
                LoopClass::UnitaryGroup => {
                    report.max_unitarity_defect = report
                        .max_unitarity_defect
                        .max(linalg::unitarity_defect(s));
                    report.max_det_defect = report
                        .max_det_defect
                        .max((linalg::determinant(s) - C64::new(1.0, 0.0)).norm());
                }
                LoopClass::Algebra => {
                    report.max_skewness_defect =
                        report.max_skewness_defect.max(linalg::skew_defect(s));
                    report.max_trace_defect = report.max_trace_defect.max(s.trace().norm());
                }
            }
        }
        report
    }
}

/// Which structure a loop is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopClass {
    /// SU(N)-valued: unitary with determinant 1 at every point.
    UnitaryGroup,
    /// su(N)-valued: skew-Hermitian and traceless at every point.
    Algebra,
}

/// Measured structural defects, all sup values over a sampling grid.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LoopClassReport {
    pub max_unitarity_defect: f64,
    pub max_det_defect: f64,
    pub max_skewness_defect: f64,
    pub max_trace_defect: f64,
}

impl LoopClassReport {
    /// Largest of the four defects.
    pub fn worst(&self) -> f64 {
        self.max_unitarity_defect
            .max(self.max_det_defect)
            .max(self.max_skewness_defect)
            .max(self.max_trace_defect)
    }
}

/// Canonical block embedding of a 2x2 loop into rows/columns (i, j) of an
/// NxN identity (indices 1-based with 1 <= i < j <= N): entry (i,i) takes
/// a11, (i,j) a12, (j,i) a21, (j,j) a22, and every other diagonal entry
/// stays 1. Preserves degree and SU-valuedness, and is a group
/// homomorphism in the loop argument.
pub fn embed_t(a: &TrigMatrixLoop, i: usize, j: usize, n: usize) -> Result<TrigMatrixLoop> {
    if a.size() != 2 {
        return Err(LoopError::SizeMismatch(a.size(), 2));
    }
    if i < 1 || j <= i || j > n {
        return Err(LoopError::BadEmbedding { i, j, n });
    }
    let (ri, rj) = (i - 1, j - 1);
    let d = a.degree() as i64;
    let mut out = TrigMatrixLoop::zeros(n, a.degree());
    for k in -d..=d {
        let block = a.coeff(k);
        let target = out.coeff_mut(k);
        target[(ri, ri)] = block[(0, 0)];
        target[(ri, rj)] = block[(0, 1)];
        target[(rj, ri)] = block[(1, 0)];
        target[(rj, rj)] = block[(1, 1)];
    }
    // The identity part of the embedding is constant, so it lives at k = 0.
    {
        let c0 = out.coeff_mut(0);
        for p in 0..n {
            if p != ri && p != rj {
                c0[(p, p)] = C64::new(1.0, 0.0);
            }
        }
    }
    Ok(out)
}

/// Sup distance between reference samples and a polynomial loop, measured
/// on the reference grid.
pub fn sup_distance_grid_loop(reference: &GridLoop, poly: &TrigMatrixLoop) -> Result<f64> {
    let sampled = poly.sample(reference.grid_len())?;
    reference.sup_distance(&sampled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    pub(crate) fn random_loop(size: usize, degree: usize, rng: &mut impl Rng) -> TrigMatrixLoop {
        let mut l = TrigMatrixLoop::zeros(size, degree);
        for k in -(degree as i64)..=(degree as i64) {
            let c = l.coeff_mut(k);
            for i in 0..size {
                for j in 0..size {
                    c[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
        }
        l
    }

    #[test]
    fn eval_constant_identity() {
        let l = TrigMatrixLoop::identity(3);
        for t in [0.0, 1.0, 2.5, -4.0] {
            assert!(linalg::spectral_norm(&(l.eval(t) - linalg::identity(3))) < 1e-15);
        }
    }

    #[test]
    fn eval_single_positive_frequency() {
        // C_1 = I at k = 1, t = pi: e^{i pi} I = -I.
        let mut l = TrigMatrixLoop::zeros(2, 1);
        *l.coeff_mut(1) = linalg::identity(2);
        let v = l.eval(std::f64::consts::PI);
        assert!(linalg::spectral_norm(&(v + linalg::identity(2))) < 1e-14);
    }

    #[test]
    fn eval_is_periodic() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let l = random_loop(3, 4, &mut rng);
        for t in [0.3, 1.7, 5.9] {
            let a = l.eval(t);
            let b = l.eval(t + 2.0 * std::f64::consts::PI);
            assert!(linalg::spectral_norm(&(a - b)) < 1e-12);
        }
    }

    #[test]
    fn multiply_by_identity() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let b = random_loop(2, 3, &mut rng);
        let prod = TrigMatrixLoop::identity(2).multiply(&b).unwrap();
        let trimmed = prod.degree_trim(TRIM_TOL);
        assert_eq!(trimmed.degree(), b.degree());
        assert!(prod.sup_distance(&b, 64).unwrap() < 1e-13);
    }

    #[test]
    fn multiply_adds_frequencies() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let mut a = TrigMatrixLoop::zeros(2, 1);
        let ca = DMatrix::from_fn(2, 2, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        *a.coeff_mut(1) = ca.clone();
        let mut b = TrigMatrixLoop::zeros(2, 2);
        let cb = DMatrix::from_fn(2, 2, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        *b.coeff_mut(2) = cb.clone();
        let prod = a.multiply(&b).unwrap();
        assert!(linalg::spectral_norm(&(prod.coeff(3) - &ca * &cb)) < 1e-14);
        for k in -3..3 {
            assert!(linalg::spectral_norm(&prod.coeff(k)) < 1e-15);
        }
    }

    #[test]
    fn multiply_matches_pointwise_products() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let a = random_loop(2, 3, &mut rng);
        let b = random_loop(2, 4, &mut rng);
        let prod = a.multiply(&b).unwrap();
        assert!(prod.degree() <= 7);
        for g in 0..64 {
            let t = 2.0 * std::f64::consts::PI * g as f64 / 64.0;
            let lhs = prod.eval(t);
            let rhs = a.eval(t) * b.eval(t);
            assert!(linalg::spectral_norm(&(lhs - rhs)) < 1e-12);
        }
    }

    #[test]
    fn multiply_rejects_size_mismatch() {
        let a = TrigMatrixLoop::identity(2);
        let b = TrigMatrixLoop::identity(3);
        assert!(matches!(a.multiply(&b), Err(LoopError::SizeMismatch(2, 3))));
    }

    #[test]
    fn analyze_recovers_constant() {
        let grid = GridLoop::from_fn(2, 8, |_| linalg::identity(2)).unwrap();
        let l = grid.analyze(0).unwrap();
        assert!(linalg::spectral_norm(&(l.coeff(0) - linalg::identity(2))) < 1e-14);
    }

    #[test]
    fn analyze_recovers_single_mode() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let c1 = DMatrix::from_fn(2, 2, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let c1c = c1.clone();
        let grid = GridLoop::from_fn(2, 8, move |t| &c1c * C64::new(t.cos(), t.sin())).unwrap();
        let l = grid.analyze(1).unwrap();
        assert!(linalg::spectral_norm(&(l.coeff(1) - &c1)) < 1e-12);
        assert!(linalg::spectral_norm(&l.coeff(0)) < 1e-13);
        assert!(linalg::spectral_norm(&l.coeff(-1)) < 1e-13);
    }

    #[test]
    fn analyze_synthesize_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let l = random_loop(2, 5, &mut rng);
        let grid = l.sample(16).unwrap();
        let back = grid.analyze(5).unwrap();
        let resampled = back.sample(16).unwrap();
        assert!(grid.sup_distance(&resampled).unwrap() < 1e-12);
        for k in -5..=5 {
            assert!(linalg::spectral_norm(&(l.coeff(k) - back.coeff(k))) < 1e-12);
        }
    }

    #[test]
    fn analyze_rejects_aliasing() {
        let grid = GridLoop::from_fn(2, 8, |_| linalg::identity(2)).unwrap();
        assert!(matches!(
            grid.analyze(4),
            Err(LoopError::Aliasing { grid: 8, degree: 4 })
        ));
    }

    #[test]
    fn trim_drops_exact_zero_block() {
        let mut l = TrigMatrixLoop::zeros(2, 2);
        *l.coeff_mut(0) = linalg::identity(2);
        *l.coeff_mut(1) = linalg::identity(2) * C64::new(0.5, 0.0);
        let trimmed = l.degree_trim(TRIM_TOL);
        assert_eq!(trimmed.degree(), 1);
    }

    #[test]
    fn trim_drops_roundoff_block() {
        let mut l = TrigMatrixLoop::zeros(2, 3);
        *l.coeff_mut(0) = linalg::identity(2);
        *l.coeff_mut(2) = linalg::identity(2) * C64::new(0.3, 0.0);
        *l.coeff_mut(3) = linalg::identity(2) * C64::new(1e-15, 0.0);
        let trimmed = l.degree_trim(1e-10);
        assert_eq!(trimmed.degree(), 2);
    }

    #[test]
    fn sup_distance_of_equal_loops_is_zero() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let l = random_loop(3, 3, &mut rng);
        assert_eq!(l.sup_distance(&l, 64).unwrap(), 0.0);
    }

    #[test]
    fn sup_distance_constants() {
        let a = TrigMatrixLoop::identity(2);
        let b = TrigMatrixLoop::constant(linalg::identity(2) * C64::new(-1.0, 0.0));
        assert!((a.sup_distance(&b, 64).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sup_distance_rotating_diagonal() {
        // a = diag(e^{it}, e^{-it}), b = I: |e^{it} - 1| peaks at 2 for t = pi.
        let mut a = TrigMatrixLoop::zeros(2, 1);
        a.coeff_mut(1)[(0, 0)] = C64::new(1.0, 0.0);
        a.coeff_mut(-1)[(1, 1)] = C64::new(1.0, 0.0);
        let b = TrigMatrixLoop::identity(2);
        let d = a.sup_distance(&b, 256).unwrap();
        assert!((d - 2.0).abs() < 1e-12);
    }

    #[test]
    fn embed_identity_size_two_is_noop() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let a = random_loop(2, 3, &mut rng);
        let e = embed_t(&a, 1, 2, 2).unwrap();
        assert!(a.sup_distance(&e, 64).unwrap() < 1e-13);
    }

    #[test]
    fn embed_constant_minus_identity() {
        let a = TrigMatrixLoop::constant(linalg::identity(2) * C64::new(-1.0, 0.0));
        let e = embed_t(&a, 1, 3, 3).unwrap();
        let v = e.eval(0.7);
        let mut expected = CMat::zeros(3, 3);
        expected[(0, 0)] = C64::new(-1.0, 0.0);
        expected[(1, 1)] = C64::new(1.0, 0.0);
        expected[(2, 2)] = C64::new(-1.0, 0.0);
        assert!(linalg::spectral_norm(&(v - expected)) < 1e-14);
    }

    #[test]
    fn embed_preserves_su_class() {
        // exp of an su(2) loop sampled, analyzed, then embedded into N=4.
        let a = crate::vp::synth_lip_su_loop(
            &crate::vp::SmoothnessSpec {
                alpha: 2.0,
                amplitude: 0.7,
                seed: 42,
                max_degree: 6,
            },
            2,
        );
        let grid = a.sample(64).unwrap().exp().unwrap();
        let u = grid.analyze(31).unwrap();
        let e = embed_t(&u, 2, 4, 4).unwrap();
        let report = e.classify(LoopClass::UnitaryGroup);
        assert!(report.max_unitarity_defect < 1e-12);
        assert!(report.max_det_defect < 1e-12);
    }

    #[test]
    fn embed_is_homomorphism() {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let a = random_loop(2, 2, &mut rng);
        let b = random_loop(2, 3, &mut rng);
        let lhs = embed_t(&a.multiply(&b).unwrap(), 1, 3, 4).unwrap();
        let rhs = embed_t(&a, 1, 3, 4)
            .unwrap()
            .multiply(&embed_t(&b, 1, 3, 4).unwrap())
            .unwrap();
        assert!(lhs.sup_distance(&rhs, 64).unwrap() < 1e-12);
    }

    #[test]
    fn embed_rejects_bad_indices() {
        let a = TrigMatrixLoop::identity(2);
        assert!(matches!(
            embed_t(&a, 2, 2, 3),
            Err(LoopError::BadEmbedding { .. })
        ));
        assert!(matches!(
            embed_t(&a, 1, 4, 3),
            Err(LoopError::BadEmbedding { .. })
        ));
    }

    #[test]
    fn classify_identity_has_zero_defects() {
        let l = TrigMatrixLoop::identity(2);
        let report = l.classify(LoopClass::UnitaryGroup);
        assert_eq!(report.max_unitarity_defect, 0.0);
        assert_eq!(report.max_det_defect, 0.0);
    }

    #[test]
    fn classify_diag_2_1_unitarity_defect() {
        // U^H U - I = diag(3, 0), spectral norm 3.
        let mut m = CMat::zeros(2, 2);
        m[(0, 0)] = C64::new(2.0, 0.0);
        m[(1, 1)] = C64::new(1.0, 0.0);
        let report = TrigMatrixLoop::constant(m).classify(LoopClass::UnitaryGroup);
        assert!((report.max_unitarity_defect - 3.0).abs() < 1e-12);
    }

    #[test]
    fn classify_exponential_of_algebra_loop() {
        let a = crate::vp::synth_lip_su_loop(
            &crate::vp::SmoothnessSpec {
                alpha: 2.0,
                amplitude: 0.8,
                seed: 5,
                max_degree: 8,
            },
            2,
        );
        let algebra_report = a.classify(LoopClass::Algebra);
        assert!(algebra_report.max_skewness_defect < 1e-12);
        assert!(algebra_report.max_trace_defect < 1e-12);
        let grid = a.sample(128).unwrap().exp().unwrap();
        let report = grid.classify(LoopClass::UnitaryGroup);
        assert!(report.max_unitarity_defect < 1e-12);
        assert!(report.max_det_defect < 1e-12);
    }
}
