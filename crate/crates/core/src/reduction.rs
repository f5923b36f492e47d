//! Adiabatic elimination of the lossy cavity and the squeezing transformation.
//!
//! With `den = Delta_1^2 + (kappa_1/2)^2`, eliminating cavity 1 gives
//!
//! ```text
//! Lambda'   = Lambda + G^2 Delta_1 / den
//! omega~'   = 1 + 2 Lambda'
//! G_eff     = G J / sqrt(den)
//! Delta_eff = delta_2 - J^2 Delta_1 / den
//! kappa_eff = kappa_2 + J^2 kappa_1 / den
//! ```
//!
//! and the single-mode squeeze `S(zeta)` with `zeta = ln(1 + 4 Lambda') / 4`
//! turns the remaining mechanics into an ordinary oscillator of frequency
//! `omega_m' = sqrt(1 + 4 Lambda')`, coupled to cavity 2 with
//! `G' = G_eff (1 + 4 Lambda')^(-1/4)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{self, LinearizedParams, Mode};
use crate::params::SystemParams;

/// Two-mode (cavity 2 + mechanics) parameters, in units of `omega_m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EffectiveParams {
    pub omega_m_tilde_prime: f64,
    pub g_eff: f64,
    pub delta_eff: f64,
    pub kappa_eff: f64,
    pub lambda_prime: f64,
}

/// Parameters in the squeezed frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransformedParams {
    pub zeta: f64,
    pub omega_m_prime: f64,
    pub g_prime: f64,
    pub n_th_prime: f64,
}

/// Eliminates cavity 1. Logs a warning when `kappa_1` is not well separated
/// from the remaining rates, but still returns the formulas' values.
pub fn effective_params(lin: &LinearizedParams, params: &SystemParams) -> Result<EffectiveParams> {
    let d1 = lin.delta_1;
    let den = d1 * d1 + 0.25 * params.kappa_1 * params.kappa_1;
    if den == 0.0 {
        return Err(Error::SingularElimination);
    }
    let j = params.coupling_j;
    let g = lin.coupling;
    let lambda_prime = lin.lambda + g * g * d1 / den;
    let eff = EffectiveParams {
        omega_m_tilde_prime: 1.0 + 2.0 * lambda_prime,
        g_eff: g * j / den.sqrt(),
        delta_eff: params.delta_2 - j * j * d1 / den,
        kappa_eff: params.kappa_2 + j * j * params.kappa_1 / den,
        lambda_prime,
    };
    let slow = params.kappa_2.max(eff.g_eff);
    if params.kappa_1 < 10.0 * slow {
        log::warn!(
            "kappa_1 = {} is not much larger than max(kappa_2, G_eff) = {}; the elimination of cavity 1 is questionable",
            params.kappa_1,
            slow
        );
    }
    Ok(eff)
}

/// `zeta = ln(1 + 4 Lambda') / 4`.
pub fn squeeze_parameter(eff: &EffectiveParams) -> Result<f64> {
    let argument = 1.0 + 4.0 * eff.lambda_prime;
    if !(argument > 0.0) {
        return Err(Error::InvertedPotential { argument });
    }
    Ok(0.25 * argument.ln())
}

pub fn transformed_params(eff: &EffectiveParams, zeta: f64, n_th: f64) -> TransformedParams {
    let stretch = (4.0 * zeta).exp(); // = 1 + 4 Lambda'
    TransformedParams {
        zeta,
        omega_m_prime: stretch.sqrt(),
        g_prime: eff.g_eff * stretch.powf(-0.25),
        n_th_prime: n_th * (2.0 * zeta).cosh() + zeta.sinh().powi(2),
    }
}

/// `(2 n' + 1) exp(-2 zeta)`.
pub fn analytic_variance(n_eff_prime: f64, zeta: f64) -> f64 {
    (2.0 * n_eff_prime + 1.0) * (-2.0 * zeta).exp()
}

/// Steady mechanical occupation of the transformed two-mode model.
pub fn cooling_residual_occupation(
    eff: &EffectiveParams,
    tp: &TransformedParams,
    params: &SystemParams,
) -> Result<f64> {
    let model = gaussian::build_transformed_model(tp, eff, params);
    let state = gaussian::solve_lyapunov(&model)?;
    let b = model
        .mode_index(Mode::Mechanics)
        .expect("transformed model contains the mechanics");
    state.occupation(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetuningReport {
    pub delta_eff: f64,
    /// `-omega_m'`, the detuning that best cools the transformed mechanics.
    pub optimal: f64,
    /// `delta_eff - optimal`.
    pub mismatch: f64,
}

pub fn optimal_detuning_report(eff: &EffectiveParams, tp: &TransformedParams) -> DetuningReport {
    let optimal = -tp.omega_m_prime;
    DetuningReport {
        delta_eff: eff.delta_eff,
        optimal,
        mismatch: eff.delta_eff - optimal,
    }
}
