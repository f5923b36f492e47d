use faer::linalg::solvers::Solve;
use faer::Mat;

use super::state::symmetrize;
use super::{CovarianceState, GaussianModel};
use crate::error::{Error, Result};
use crate::linalg::frobenius;

const REFINEMENT_STEPS: usize = 2;
const RESIDUAL_TOL: f64 = 1e-10;

/// `A V + V Aᵀ + D`.
pub fn lyapunov_residual(model: &GaussianModel, v: &Mat<f64>) -> Mat<f64> {
    let a = &model.drift;
    let av = a * v;
    let mut r = &av + av.transpose();
    r += &model.diffusion;
    r
}

/// Steady covariance: the solution of `A V + V Aᵀ + D = 0`, obtained from the
/// vectorized system `(A ⊗ I + I ⊗ A) vec V = -vec D`.
pub fn solve_lyapunov(model: &GaussianModel) -> Result<CovarianceState> {
    let (growth, eigenvalue) = model.max_growth_rate()?;
    if growth >= 0.0 {
        return Err(Error::Unstable { eigenvalue });
    }
    let a = &model.drift;
    let n = a.nrows();
    let nn = n * n;
    // Column-stacked vec: entry V_ij sits at i + n j.
    let mut kron = Mat::<f64>::zeros(nn, nn);
    for j in 0..n {
        for i in 0..n {
            let row = i + n * j;
            for k in 0..n {
                kron[(row, k + n * j)] += a[(i, k)];
                kron[(row, i + n * k)] += a[(j, k)];
            }
        }
    }
    let rhs = Mat::<f64>::from_fn(nn, 1, |r, _| -model.diffusion[(r % n, r / n)]);
    let lu = kron.full_piv_lu();
    let mut x = lu.solve(&rhs);
    for _ in 0..REFINEMENT_STEPS {
        let r = &rhs - &kron * &x;
        x += lu.solve(&r);
    }
    let mut cov = Mat::<f64>::from_fn(n, n, |i, j| x[(i + n * j, 0)]);
    symmetrize(&mut cov);
    if !(0..n).all(|i| (0..n).all(|j| cov[(i, j)].is_finite())) {
        return Err(Error::Numerics("Lyapunov solve produced non-finite entries".into()));
    }

    let residual = frobenius(&lyapunov_residual(model, &cov));
    let scale = frobenius(&model.diffusion);
    if residual > RESIDUAL_TOL * scale {
        return Err(Error::Numerics(format!(
            "Lyapunov residual {residual:e} exceeds {RESIDUAL_TOL:e} * ||D|| = {:e}",
            RESIDUAL_TOL * scale
        )));
    }
    Ok(CovarianceState {
        mean: vec![0.0; n],
        cov,
        modes: model.modes.clone(),
    })
}
