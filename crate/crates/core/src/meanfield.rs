//! Classical steady amplitudes of the two cavities and the mechanics.
//!
//! In a frame rotating at the drive frequency and with every rate in units of
//! `omega_m`, the amplitudes obey
//!
//! ```text
//! d(alpha_1)/dt = [i(delta_1 + g(beta + beta*)) - kappa_1/2] alpha_1 - i J alpha_2 - i Omega_d
//! d(alpha_2)/dt = (i delta_2 - kappa_2/2) alpha_2 - i J alpha_1
//! d(beta)/dt    = (-i - gamma_m/2) beta - 2 i eta (beta + beta*)^3 - 6 i eta (beta + beta*) + i g |alpha_1|^2
//! ```
//!
//! The root is found with Newton's method on the six real components, started
//! from the empty system at zero power and carried up in power by continuation.

use num_complex::Complex64;
use serde::Serialize;

use crate::config::Numerics;
use crate::error::{Error, Result};
use crate::gaussian;
use crate::params::{drive_amplitude_at, SystemParams};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const MAX_HALVINGS: usize = 20;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct MeanField {
    pub alpha_1: Complex64,
    pub alpha_2: Complex64,
    pub beta: Complex64,
}

impl MeanField {
    pub const ZERO: MeanField = MeanField {
        alpha_1: Complex64 { re: 0.0, im: 0.0 },
        alpha_2: Complex64 { re: 0.0, im: 0.0 },
        beta: Complex64 { re: 0.0, im: 0.0 },
    };

    fn to_real(self) -> [f64; 6] {
        [
            self.alpha_1.re,
            self.alpha_1.im,
            self.alpha_2.re,
            self.alpha_2.im,
            self.beta.re,
            self.beta.im,
        ]
    }

    fn from_real(u: &[f64; 6]) -> Self {
        MeanField {
            alpha_1: Complex64::new(u[0], u[1]),
            alpha_2: Complex64::new(u[2], u[3]),
            beta: Complex64::new(u[4], u[5]),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_real().iter().all(|v| v.is_finite())
    }
}

/// A converged mean-field root together with its linear stability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SteadyState {
    pub power: f64,
    pub field: MeanField,
    /// Largest real part among the eigenvalues of the fluctuation drift matrix.
    pub max_growth_rate: f64,
    pub stable: bool,
    /// Infinity norm of the right-hand side at `field`.
    pub residual: f64,
}

/// Right-hand side of the mean-field equations at the configured drive power.
pub fn mean_field_rhs(params: &SystemParams, state: &MeanField) -> [Complex64; 3] {
    let omega = drive_amplitude_at(params, params.drive_power)
        .map(|d| d.omega_drive)
        .unwrap_or(f64::NAN);
    mean_field_rhs_with_drive(params, Complex64::new(omega, 0.0), state)
}

/// Right-hand side with an explicit, possibly complex, drive amplitude.
pub fn mean_field_rhs_with_drive(
    params: &SystemParams,
    drive: Complex64,
    state: &MeanField,
) -> [Complex64; 3] {
    let p = params;
    let MeanField {
        alpha_1: a1,
        alpha_2: a2,
        beta: b,
    } = *state;
    let bc = b.conj();
    let d_a1 = (I * (p.delta_1 + p.coupling_g * (b + bc)) - p.kappa_1 / 2.0) * a1
        - I * p.coupling_j * a2
        - I * drive;
    let d_a2 = (I * p.delta_2 - p.kappa_2 / 2.0) * a2 - I * p.coupling_j * a1;
    let cubic = bc * bc * bc + b * b * b + 3.0 * bc * bc * b + 3.0 * bc * b * b + 3.0 * bc + 3.0 * b;
    let d_b = (-I - p.gamma_m / 2.0) * b - 2.0 * I * p.duffing_eta * cubic
        + I * p.coupling_g * a1.conj() * a1;
    [d_a1, d_a2, d_b]
}

fn residual_real(params: &SystemParams, omega: f64, u: &[f64; 6]) -> [f64; 6] {
    let r = mean_field_rhs_with_drive(params, Complex64::new(omega, 0.0), &MeanField::from_real(u));
    [r[0].re, r[0].im, r[1].re, r[1].im, r[2].re, r[2].im]
}

fn inf_norm(v: &[f64; 6]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Jacobian of the real residual with respect to
/// `(Re a1, Im a1, Re a2, Im a2, Re b, Im b)`.
fn jacobian(params: &SystemParams, u: &[f64; 6]) -> [[f64; 6]; 6] {
    let p = params;
    let [x1, y1, _, _, x5, _] = *u;
    let k1 = p.kappa_1 / 2.0;
    let k2 = p.kappa_2 / 2.0;
    let hg = p.gamma_m / 2.0;
    let det = p.delta_1 + 2.0 * p.coupling_g * x5;
    let g = p.coupling_g;
    let j = p.coupling_j;
    let stiff = -1.0 - 2.0 * p.duffing_eta * (24.0 * x5 * x5 + 6.0);
    [
        [-k1, -det, 0.0, j, -2.0 * g * y1, 0.0],
        [det, -k1, -j, 0.0, 2.0 * g * x1, 0.0],
        [0.0, j, -k2, -p.delta_2, 0.0, 0.0],
        [-j, 0.0, p.delta_2, -k2, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, -hg, 1.0],
        [2.0 * g * x1, 2.0 * g * y1, 0.0, 0.0, stiff, -hg],
    ]
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve6(mut a: [[f64; 6]; 6], mut b: [f64; 6]) -> Option<[f64; 6]> {
    for col in 0..6 {
        let pivot = (col..6).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[pivot][col] == 0.0 || !a[pivot][col].is_finite() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..6 {
            let f = a[row][col] / a[col][col];
            for k in col..6 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 6];
    for row in (0..6).rev() {
        let mut acc = b[row];
        for k in row + 1..6 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Damped Newton iteration at fixed drive. Returns the root and its residual.
fn newton(
    params: &SystemParams,
    omega: f64,
    seed: [f64; 6],
    numerics: &Numerics,
) -> Option<([f64; 6], f64)> {
    let mut u = seed;
    let mut f = residual_real(params, omega, &u);
    let mut norm = inf_norm(&f);
    for _ in 0..numerics.newton_max_iter {
        if norm <= numerics.tol_meanfield {
            return Some((u, norm));
        }
        let step = solve6(jacobian(params, &u), f.map(|v| -v))?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let trial: [f64; 6] = std::array::from_fn(|k| u[k] + lambda * step[k]);
            let f_trial = residual_real(params, omega, &trial);
            let n_trial = inf_norm(&f_trial);
            if n_trial.is_finite() && n_trial < norm {
                u = trial;
                f = f_trial;
                norm = n_trial;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            // No descent left: either converged to rounding level or stuck.
            break;
        }
    }
    (norm <= numerics.tol_meanfield).then_some((u, norm))
}

/// Continuation in drive power from `(from_power, from)` up to `to_power`.
fn continue_to(
    params: &SystemParams,
    numerics: &Numerics,
    from_power: f64,
    from: [f64; 6],
    to_power: f64,
) -> Result<([f64; 6], f64)> {
    let omega_at = |p: f64| drive_amplitude_at(params, p).map(|d| d.omega_drive);
    if to_power == from_power {
        return newton(params, omega_at(to_power)?, from, numerics)
            .ok_or(Error::ContinuationFailure { last_power: from_power });
    }
    let span = to_power - from_power;
    let max_step = numerics.continuation_step * to_power;
    let min_step = numerics.continuation_min_step * span;
    let mut step = max_step.min(span);
    let mut power = from_power;
    let mut u = from;
    let mut residual = f64::NAN;
    while power < to_power {
        let next = if to_power - power <= step * (1.0 + 1e-12) {
            to_power
        } else {
            power + step
        };
        match newton(params, omega_at(next)?, u, numerics) {
            Some((root, res)) => {
                power = next;
                u = root;
                residual = res;
                step = (step * 2.0).min(max_step);
            }
            None => {
                step *= 0.5;
                if step < min_step {
                    return Err(Error::ContinuationFailure { last_power: power });
                }
            }
        }
    }
    Ok((u, residual))
}

fn classify(params: &SystemParams, power: f64, u: [f64; 6], residual: f64) -> Result<SteadyState> {
    let field = MeanField::from_real(&u);
    let mut at_power = params.clone();
    at_power.drive_power = power;
    let lin = gaussian::linearize(&at_power, &field);
    let model = gaussian::build_full_model(&at_power, &lin);
    let (max_growth_rate, _) = model.max_growth_rate()?;
    Ok(SteadyState {
        power,
        field,
        max_growth_rate,
        stable: max_growth_rate < 0.0,
        residual,
    })
}

/// Steady amplitudes at `params.drive_power`, reached by continuation from the
/// undriven system. Instability is reported in the returned flag, not as an error.
pub fn solve_steady(params: &SystemParams, numerics: &Numerics) -> Result<SteadyState> {
    params.validate()?;
    let (u, residual) = continue_to(params, numerics, 0.0, [0.0; 6], params.drive_power)?;
    classify(params, params.drive_power, u, residual)
}

/// Solves along an ascending power grid, seeding each point with the previous
/// root. A failed point does not stop the sweep: the next point restarts from
/// the last converged root.
pub fn sweep_power(
    params: &SystemParams,
    numerics: &Numerics,
    grid: &[f64],
) -> Result<Vec<Result<SteadyState>>> {
    params.validate()?;
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("power grid must be sorted ascending".into()));
    }
    if let Some(&bad) = grid.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::domain("drive_power", bad, "grid values must be finite and >= 0"));
    }
    let mut power = 0.0;
    let mut u = [0.0; 6];
    let mut rows = Vec::with_capacity(grid.len());
    for &target in grid {
        let row = continue_to(params, numerics, power, u, target).and_then(|(root, residual)| {
            power = target;
            u = root;
            classify(params, target, root, residual)
        });
        rows.push(row);
    }
    Ok(rows)
}
