//! Linearized quantum fluctuations as a Gaussian (drift/diffusion) system.
//!
//! Quadratures are `X = a + a†` and `Y = -i(a - a†)`, so the vacuum has unit
//! variance and squeezing means `Var(X) < 1`. Covariances are symmetrized:
//! `V_ij = <du_i du_j + du_j du_i> / 2` with `u = (X_1, Y_1, X_2, Y_2, ...)`.

mod evolve;
mod lyapunov;
mod model;
mod state;

use num_complex::Complex64;
use serde::Serialize;

use crate::meanfield::MeanField;
use crate::params::SystemParams;

pub use evolve::{evolve_covariance, max_stable_dt, TrajectoryPoint, COVARIANCE_DT_FACTOR};
pub use lyapunov::{lyapunov_residual, solve_lyapunov};
pub use model::{
    build_effective_model, build_full_model, build_transformed_model, Bath, GaussianModel,
    LinearLangevin, Mode,
};
pub use state::CovarianceState;

/// Coefficients of the fluctuation equations, in units of `omega_m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearizedParams {
    /// Cavity-1 detuning including the radiation-pressure shift.
    pub delta_1: f64,
    /// Mechanical frequency shifted by the Duffing term, `1 + 2 Lambda`.
    pub omega_m_tilde: f64,
    /// Coefficient of the bilinear `b^2 + b†^2` term.
    pub lambda: f64,
    /// Enhanced optomechanical coupling `g |alpha_1|`.
    pub coupling: f64,
}

/// Evaluates the fluctuation coefficients at a mean-field point.
///
/// The detuning shift uses `g (beta + beta*) = 2 g Re(beta)`, the form that
/// appears in the mean-field equations.
pub fn linearize(params: &SystemParams, mf: &MeanField) -> LinearizedParams {
    let lambda = 3.0 * params.duffing_eta * (4.0 * mf.beta.norm_sqr() + 1.0);
    LinearizedParams {
        delta_1: params.delta_1 + params.coupling_g * (mf.beta + mf.beta.conj()).re,
        omega_m_tilde: 1.0 + 2.0 * lambda,
        lambda,
        coupling: params.coupling_g * mf.alpha_1.norm(),
    }
}

pub(crate) const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
