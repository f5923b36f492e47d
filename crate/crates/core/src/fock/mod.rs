//! Truncated-Fock Lindblad solver used as an independent check on the
//! Gaussian tier.
//!
//! Density matrices are vectorized by stacking columns, so `vec(A X B) =
//! (Bᵀ ⊗ A) vec(X)` and the generator reads
//!
//! ```text
//! L = -i (I ⊗ H - Hᵀ ⊗ I) + sum_k r_k [ conj(c_k) ⊗ c_k - (I ⊗ c_k†c_k)/2 - ((c_k†c_k)ᵀ ⊗ I)/2 ]
//! ```
//!
//! Tensor-product modes are ordered as listed, the last mode varying fastest.

mod diagnostic;
mod evolve;
mod liouvillian;
mod moments;
mod operators;
mod steady;

pub use diagnostic::{truncation_diagnostic, TruncationReport, BOUNDARY_THRESHOLD};
pub use evolve::{evolve, max_stable_dt, FockSample, RK4_STABILITY_LIMIT};
pub use liouvillian::{build_liouvillian_effective, build_liouvillian_full, Jump, Liouvillian};
pub use moments::{expectation, moments, ModeMoments, MomentRecord};
pub use operators::FockOperatorSet;
pub use steady::{min_eigenvalue, steady_state, SteadyStateOutcome};

use faer::Mat;
use num_complex::Complex64;

/// Density matrix of the tensor-product Fock vacuum.
pub fn ground_state(dim: usize) -> Mat<Complex64> {
    let mut rho = Mat::zeros(dim, dim);
    rho[(0, 0)] = Complex64::new(1.0, 0.0);
    rho
}

/// Column-stacked vector of a square matrix.
pub fn vectorize(rho: &Mat<Complex64>) -> Vec<Complex64> {
    let d = rho.nrows();
    (0..d * d).map(|k| rho[(k % d, k / d)]).collect()
}

pub fn unvectorize(v: &[Complex64], d: usize) -> Mat<Complex64> {
    Mat::from_fn(d, d, |i, j| v[i + d * j])
}
