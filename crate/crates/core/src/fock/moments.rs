use faer::Mat;
use num_complex::Complex64;
use serde::Serialize;

use super::FockOperatorSet;
use crate::linalg::CsrMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModeMoments {
    pub mean_x: f64,
    pub mean_y: f64,
    pub var_x: f64,
    pub var_y: f64,
    /// `<a†a>`, including any coherent part.
    pub occupation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentRecord {
    pub modes: Vec<ModeMoments>,
    pub trace: f64,
}

/// `tr(op ρ)`.
pub fn expectation(op: &CsrMatrix, rho: &Mat<Complex64>) -> Complex64 {
    op.triplets().map(|(i, j, v)| v * rho[(j, i)]).sum()
}

/// Quadrature moments of every mode, from normal-ordered expectations:
/// `<X²> = 2 Re<a²> + 2<a†a> + 1`, `<Y²> = -2 Re<a²> + 2<a†a> + 1`.
/// These are the exact matrix elements of `X²` between retained levels; the
/// product of two truncated `X` matrices would drop `a a†` on the top level.
pub fn moments(rho: &Mat<Complex64>, ops: &FockOperatorSet) -> MomentRecord {
    let trace: f64 = (0..rho.nrows()).map(|i| rho[(i, i)].re).sum();
    let modes = (0..ops.n_modes())
        .map(|k| {
            let a = expectation(ops.a(k), rho) / trace;
            let a2 = expectation(ops.a_squared(k), rho) / trace;
            let n = expectation(ops.number(k), rho).re / trace;
            let (mean_x, mean_y) = (2.0 * a.re, 2.0 * a.im);
            ModeMoments {
                mean_x,
                mean_y,
                var_x: 2.0 * a2.re + 2.0 * n + 1.0 - mean_x * mean_x,
                var_y: -2.0 * a2.re + 2.0 * n + 1.0 - mean_y * mean_y,
                occupation: n,
            }
        })
        .collect();
    MomentRecord { modes, trace }
}
