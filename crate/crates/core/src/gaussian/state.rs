use faer::{Mat, Side};
use num_complex::Complex64;

use super::Mode;
use crate::error::{Error, Result};

/// First and second moments of a Gaussian state in the quadrature basis.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceState {
    pub mean: Vec<f64>,
    pub cov: Mat<f64>,
    pub modes: Vec<Mode>,
}

impl CovarianceState {
    /// Every mode in its ground state: `V = I`.
    pub fn vacuum(modes: Vec<Mode>) -> Self {
        let dim = 2 * modes.len();
        CovarianceState {
            mean: vec![0.0; dim],
            cov: Mat::identity(dim, dim),
            modes,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    fn check(&self, index: usize) -> Result<()> {
        if index < self.n_modes() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index,
                modes: self.n_modes(),
            })
        }
    }

    pub fn variance_x(&self, index: usize) -> Result<f64> {
        self.check(index)?;
        Ok(self.cov[(2 * index, 2 * index)])
    }

    pub fn variance_y(&self, index: usize) -> Result<f64> {
        self.check(index)?;
        Ok(self.cov[(2 * index + 1, 2 * index + 1)])
    }

    /// Mean excitation number of the fluctuations, `(Var X + Var Y - 2) / 4`.
    pub fn occupation(&self, index: usize) -> Result<f64> {
        Ok((self.variance_x(index)? + self.variance_y(index)? - 2.0) / 4.0)
    }

    pub fn mode_block(&self, index: usize) -> Result<[[f64; 2]; 2]> {
        self.check(index)?;
        let k = 2 * index;
        Ok([
            [self.cov[(k, k)], self.cov[(k, k + 1)]],
            [self.cov[(k + 1, k)], self.cov[(k + 1, k + 1)]],
        ])
    }

    /// Determinant of the single-mode block; at least 1 for a physical state.
    pub fn mode_determinant(&self, index: usize) -> Result<f64> {
        let b = self.mode_block(index)?;
        Ok(b[0][0] * b[1][1] - b[0][1] * b[1][0])
    }

    /// Purity `1 / sqrt(det V_mode)` of the reduced single-mode state.
    pub fn purity(&self, index: usize) -> Result<f64> {
        Ok(1.0 / self.mode_determinant(index)?.sqrt())
    }

    /// Smallest eigenvalue of `V + i Omega`; non-negative for a physical state.
    pub fn uncertainty_min_eigenvalue(&self) -> Result<f64> {
        let dim = self.cov.nrows();
        let m = Mat::<Complex64>::from_fn(dim, dim, |i, j| {
            let omega = if i / 2 != j / 2 {
                0.0
            } else if i % 2 == 0 && j == i + 1 {
                1.0
            } else if i % 2 == 1 && j + 1 == i {
                -1.0
            } else {
                0.0
            };
            Complex64::new(self.cov[(i, j)], omega)
        });
        let eig = m
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Numerics(format!("Hermitian eigenvalues failed: {e:?}")))?;
        Ok(eig.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// Replaces `V` by `(V + Vᵀ) / 2`.
    pub fn symmetrize(&mut self) {
        symmetrize(&mut self.cov);
    }
}

pub(crate) fn symmetrize(m: &mut Mat<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn single(cov: [[f64; 2]; 2]) -> CovarianceState {
        CovarianceState {
            mean: vec![0.0; 2],
            cov: Mat::from_fn(2, 2, |i, j| cov[i][j]),
            modes: vec![Mode::Mechanics],
        }
    }

    #[test]
    fn vacuum_has_unit_variances() {
        let v = CovarianceState::vacuum(vec![Mode::Cavity2, Mode::Mechanics]);
        assert_eq!(v.variance_x(1).unwrap(), 1.0);
        assert_eq!(v.variance_y(0).unwrap(), 1.0);
        assert_eq!(v.occupation(1).unwrap(), 0.0);
        assert_relative_eq!(v.uncertainty_min_eigenvalue().unwrap(), 0.0, epsilon = 1e-12);
        assert!(matches!(
            v.variance_x(2),
            Err(Error::IndexOutOfRange { index: 2, modes: 2 })
        ));
    }

    #[test]
    fn squeezed_and_thermal_states() {
        let zeta: f64 = 0.54;
        let sq = single([[(-2.0 * zeta).exp(), 0.0], [0.0, (2.0 * zeta).exp()]]);
        assert_relative_eq!(sq.variance_x(0).unwrap(), (-2.0 * zeta).exp());
        assert_relative_eq!(sq.mode_determinant(0).unwrap(), 1.0, max_relative = 1e-14);
        assert!(sq.uncertainty_min_eigenvalue().unwrap() > -1e-12);

        let n = 0.7;
        let th = single([[2.0 * n + 1.0, 0.0], [0.0, 2.0 * n + 1.0]]);
        assert_relative_eq!(th.variance_x(0).unwrap(), 2.4);
        assert_relative_eq!(th.occupation(0).unwrap(), n, max_relative = 1e-14);
        assert_relative_eq!(th.purity(0).unwrap(), 1.0 / 2.4, max_relative = 1e-14);
    }

    #[test]
    fn sub_vacuum_noise_in_both_quadratures_violates_uncertainty() {
        let bad = single([[0.5, 0.0], [0.0, 0.5]]);
        assert!(bad.uncertainty_min_eigenvalue().unwrap() < -0.4);
    }
}
