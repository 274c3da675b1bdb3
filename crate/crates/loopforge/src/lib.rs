//! Structure-preserving approximation of SU(N)-valued loops by
//! SU(N)-valued trigonometric-polynomial loops of prescribed degree.
//!
//! A loop is a 2π-periodic function from the circle into a matrix group
//! (SU(N)) or its Lie algebra (su(N), the traceless skew-Hermitian
//! matrices). The crate builds polynomial approximants that are *exactly*
//! unitary with determinant one at every point of the circle, with a hard
//! bound on the trigonometric degree, by composing
//!
//! 1. de la Vallée Poussin smoothing of algebra-valued loops ([`vp`]),
//! 2. expansion in a designated basis of su(2) polynomial loops whose
//!    exponentials are themselves polynomial loops ([`su2`]),
//! 3. symmetric operator-splitting schemes of arbitrary even order
//!    ([`splitting`]),
//! 4. factor-by-factor assembly with block embeddings ([`pipeline`]).
//!
//! The [`harness`] module adds convergence sweeps, slope fitting and file
//! formats so every quantitative mechanism (smoothing rate, splitting
//! order, degree bounds, factor error law) can be measured from the
//! command line.

pub mod error;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod loops;
pub mod pipeline;
pub mod rates;
pub mod splitting;
pub mod su2;
pub mod vp;

pub use error::LoopError;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, LoopError>;
