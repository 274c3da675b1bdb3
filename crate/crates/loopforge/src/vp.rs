//! de la Vallée Poussin smoothing of algebra-valued loops, plus a seeded
//! generator of synthetic loops with a prescribed smoothness exponent.
//!
//! The delayed mean `V_m = (1/(m-h+1)) sum_{j=h}^m S_j` with `h = ceil(m/2)`
//! has output degree <= m, reproduces every loop of degree <= h exactly,
//! and approximates at the optimal O(m^{-alpha}) rate on Lip_alpha loops.
//! It acts componentwise through a real, even multiplier on the Fourier
//! coefficients, so skew-Hermitian-valued and traceless-valued inputs stay
//! exactly in class.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, C64, CMat};
use crate::loops::{GridLoop, TrigMatrixLoop};
use crate::Result;

/// Parameters of a synthetic loop with prescribed Lipschitz smoothness.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SmoothnessSpec {
    /// Smoothness exponent alpha > 0.
    pub alpha: f64,
    /// Scale of the coefficient norms.
    pub amplitude: f64,
    /// RNG seed; identical seeds give bitwise identical loops.
    pub seed: u64,
    /// Bandlimit of the generated loop.
    pub max_degree: usize,
}

/// Degree-j truncation of the Fourier series of the sampled loop.
pub fn partial_sum(g: &GridLoop, j: usize) -> Result<TrigMatrixLoop> {
    g.analyze(j)
}

/// Index of the first partial sum entering the delayed mean of budget m.
pub fn vp_lower_index(m: usize) -> usize {
    m.div_ceil(2)
}

/// Multiplier applied to coefficient `C_k` by the delayed mean of budget m:
/// 1 for |k| <= h, (m - |k| + 1)/(m - h + 1) for h < |k| <= m, 0 beyond.
pub fn vp_weight(m: usize, k: i64) -> f64 {
    let h = vp_lower_index(m) as i64;
    let k = k.abs();
    if k <= h {
        1.0
    } else if k <= m as i64 {
        (m as i64 - k + 1) as f64 / (m as i64 - h + 1) as f64
    } else {
        0.0
    }
}

/// de la Vallée Poussin mean `V_m(g)` of the sampled loop.
pub fn vp_mean(g: &GridLoop, m: usize) -> Result<TrigMatrixLoop> {
    let full = g.analyze(m)?;
    Ok(apply_vp_weights(&full, m))
}

/// Applies the VP multiplier to an already-analyzed loop.
pub fn vp_mean_of_loop(a: &TrigMatrixLoop, m: usize) -> TrigMatrixLoop {
    apply_vp_weights(&a.truncate(m), m)
}

fn apply_vp_weights(full: &TrigMatrixLoop, m: usize) -> TrigMatrixLoop {
    let d = full.degree().min(m) as i64;
    let mut out = TrigMatrixLoop::zeros(full.size(), d as usize);
    for k in -d..=d {
        *out.coeff_mut(k) = full.coeff(k) * C64::new(vp_weight(m, k), 0.0);
    }
    out
}

/// Draws a random traceless skew-Hermitian matrix with unit spectral norm.
fn random_su_direction(n: usize, rng: &mut impl Rng) -> CMat {
    let raw = DMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let skew = (&raw - raw.adjoint()) * C64::new(0.5, 0.0);
    let traceless = &skew - CMat::identity(n, n) * (skew.trace() / C64::new(n as f64, 0.0));
    let norm = linalg::spectral_norm(&traceless);
    if norm < 1e-14 {
        // vanishing draw: fall back to a fixed direction
        let mut m = CMat::zeros(n, n);
        m[(0, 0)] = C64::new(0.0, 1.0);
        m[(n - 1, n - 1)] = C64::new(0.0, -1.0);
        m * C64::new(1.0 / 1.0, 0.0)
    } else {
        traceless * C64::new(1.0 / norm, 0.0)
    }
}

/// Draws a random complex traceless matrix with unit spectral norm (the
/// k > 0 coefficient; the algebra symmetry fixes `C_{-k} = -C_k^H`).
fn random_traceless_direction(n: usize, rng: &mut impl Rng) -> CMat {
    let raw = DMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let traceless = &raw - CMat::identity(n, n) * (raw.trace() / C64::new(n as f64, 0.0));
    let norm = linalg::spectral_norm(&traceless);
    if norm < 1e-14 {
        let mut m = CMat::zeros(n, n);
        m[(0, n - 1)] = C64::new(1.0, 0.0);
        m
    } else {
        traceless * C64::new(1.0 / norm, 0.0)
    }
}

/// Synthesizes a skew-Hermitian traceless loop whose coefficient norms
/// decay as `amplitude * (1+|k|)^{-(alpha+1)}` — a sufficient condition
/// for Lip_alpha membership — with seeded pseudo-random directions.
pub fn synth_lip_su_loop(spec: &SmoothnessSpec, size: usize) -> TrigMatrixLoop {
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let d = spec.max_degree as i64;
    let mut out = TrigMatrixLoop::zeros(size, spec.max_degree);
    let decay = |k: i64| spec.amplitude * (1.0 + k.abs() as f64).powf(-(spec.alpha + 1.0));
    *out.coeff_mut(0) = random_su_direction(size, &mut rng) * C64::new(decay(0), 0.0);
    for k in 1..=d {
        let dir = random_traceless_direction(size, &mut rng);
        let c = dir * C64::new(decay(k), 0.0);
        *out.coeff_mut(-k) = -c.adjoint();
        *out.coeff_mut(k) = c;
    }
    out
}
