//! Physical parameters of the double-cavity optomechanical system.
//!
//! Every rate is stored in units of the bare mechanical angular frequency
//! `omega_m`. Only `omega_m` and `omega_d` (rad/s), `drive_power` (W) and the
//! optional bath temperature (K) carry SI units; they are converted once, at the
//! ingestion boundary, and never appear in downstream arithmetic.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant in J s.
pub const HBAR: f64 = 1.054_571_8e-34;

/// Boltzmann constant in J/K.
pub const K_B: f64 = 1.380_649e-23;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Bare mechanical angular frequency (rad/s); the unit of every rate below.
    pub omega_m: f64,
    /// Cavity-1 detuning `omega_d - omega_1`.
    pub delta_1: f64,
    /// Cavity-2 detuning `omega_d - omega_2`.
    pub delta_2: f64,
    /// Intercavity (photon hopping) coupling.
    pub coupling_j: f64,
    /// Single-photon optomechanical coupling.
    pub coupling_g: f64,
    /// Amplitude of the quartic (Duffing) mechanical term.
    pub duffing_eta: f64,
    pub kappa_1: f64,
    pub kappa_2: f64,
    pub gamma_m: f64,
    /// Mean thermal phonon number of the mechanical bath.
    pub n_th: f64,
    /// Input laser power (W).
    pub drive_power: f64,
    /// Drive angular frequency (rad/s).
    pub omega_d: f64,
}

impl SystemParams {
    /// The reference parameter set: `omega_m/2pi = 5 MHz`, optical drive at
    /// 500 THz, `delta_1 = 50`, `delta_2 = 1.05`, `J = 18`, `g = 1e-3`,
    /// `eta = 1e-4`, `kappa_1 = 100`, `kappa_2 = 0.1`, `gamma_m = 1e-6`
    /// (all in units of `omega_m`), ground-state bath and `P = 0.53 mW`.
    pub fn reference() -> Self {
        SystemParams {
            omega_m: 2.0 * PI * 5.0e6,
            delta_1: 50.0,
            delta_2: 1.05,
            coupling_j: 18.0,
            coupling_g: 1.0e-3,
            duffing_eta: 1.0e-4,
            kappa_1: 100.0,
            kappa_2: 0.1,
            gamma_m: 1.0e-6,
            n_th: 0.0,
            drive_power: 0.53e-3,
            omega_d: 2.0 * PI * 500.0e12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega_m", self.omega_m),
            ("delta_1", self.delta_1),
            ("delta_2", self.delta_2),
            ("coupling_j", self.coupling_j),
            ("coupling_g", self.coupling_g),
            ("duffing_eta", self.duffing_eta),
            ("kappa_1", self.kappa_1),
            ("kappa_2", self.kappa_2),
            ("gamma_m", self.gamma_m),
            ("n_th", self.n_th),
            ("drive_power", self.drive_power),
            ("omega_d", self.omega_d),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::domain(name, value, "must be finite"));
            }
        }
        let non_negative = [
            ("kappa_1", self.kappa_1),
            ("kappa_2", self.kappa_2),
            ("gamma_m", self.gamma_m),
            ("n_th", self.n_th),
            ("drive_power", self.drive_power),
        ];
        for (name, value) in non_negative {
            if value < 0.0 {
                return Err(Error::domain(name, value, "must be non-negative"));
            }
        }
        if self.omega_m <= 0.0 {
            return Err(Error::domain("omega_m", self.omega_m, "must be positive"));
        }
        if self.omega_d <= 0.0 {
            return Err(Error::domain("omega_d", self.omega_d, "must be positive"));
        }
        Ok(())
    }

    /// Converts an ordinary frequency in Hz into `omega_m` units.
    pub fn hz_to_omega_m(&self, hz: f64) -> f64 {
        2.0 * PI * hz / self.omega_m
    }
}

/// Classical drive strength `Omega_d`, in units of `omega_m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveAmplitude {
    pub omega_drive: f64,
}

/// `Omega_d = sqrt(2 P kappa_1 / (hbar omega_d))`, with `kappa_1` converted to
/// rad/s through `omega_m`, returned in units of `omega_m`.
pub fn drive_amplitude(params: &SystemParams) -> Result<DriveAmplitude> {
    drive_amplitude_at(params, params.drive_power)
}

/// Same as [`drive_amplitude`] at an explicit power, used by power continuation.
pub fn drive_amplitude_at(params: &SystemParams, power: f64) -> Result<DriveAmplitude> {
    if !power.is_finite() || power < 0.0 {
        return Err(Error::domain("drive_power", power, "must be finite and >= 0"));
    }
    if !params.kappa_1.is_finite() || params.kappa_1 < 0.0 {
        return Err(Error::domain("kappa_1", params.kappa_1, "must be finite and >= 0"));
    }
    if !params.omega_m.is_finite() || params.omega_m <= 0.0 {
        return Err(Error::domain("omega_m", params.omega_m, "must be finite and > 0"));
    }
    if !params.omega_d.is_finite() || params.omega_d <= 0.0 {
        return Err(Error::domain("omega_d", params.omega_d, "must be finite and > 0"));
    }
    let kappa_1_si = params.kappa_1 * params.omega_m;
    let omega_si = (2.0 * power * kappa_1_si / (HBAR * params.omega_d)).sqrt();
    Ok(DriveAmplitude {
        omega_drive: omega_si / params.omega_m,
    })
}

/// Bose-Einstein occupation `1 / (exp(hbar omega_m / k_B T) - 1)`; zero at `T = 0`.
pub fn thermal_occupation(temperature: f64, omega_m: f64) -> Result<f64> {
    if !temperature.is_finite() || temperature < 0.0 {
        return Err(Error::domain("temperature", temperature, "must be finite and >= 0"));
    }
    if !omega_m.is_finite() || omega_m <= 0.0 {
        return Err(Error::domain("omega_m", omega_m, "must be finite and > 0"));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega_m / (K_B * temperature);
    Ok(1.0 / x.exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_power_gives_zero_drive() {
        let mut p = SystemParams::reference();
        p.drive_power = 0.0;
        assert_eq!(drive_amplitude(&p).unwrap().omega_drive, 0.0);
    }

    #[test]
    fn reference_drive_amplitude() {
        // Hand arithmetic: kappa_1 = 100 * 2pi * 5e6 = 3.14159e9 rad/s,
        // hbar * omega_d = 1.0545718e-34 * 3.14159e15 = 3.31303e-19 J,
        // 2 P kappa_1 = 3.33009e6, ratio = 1.00515e25, sqrt = 3.17041e12 rad/s,
        // divided by omega_m = 3.14159e7 -> 1.00917e5.
        let p = SystemParams::reference();
        let omega = drive_amplitude(&p).unwrap().omega_drive;
        assert_relative_eq!(omega, 1.00917e5, max_relative = 1e-5);
    }

    #[test]
    fn drive_scales_with_sqrt_power() {
        let mut p = SystemParams::reference();
        let base = drive_amplitude(&p).unwrap().omega_drive;
        p.drive_power *= 4.0;
        let quadrupled = drive_amplitude(&p).unwrap().omega_drive;
        assert_relative_eq!(quadrupled, 2.0 * base, max_relative = 1e-14);
    }

    #[test]
    fn negative_or_nan_power_is_rejected() {
        let mut p = SystemParams::reference();
        p.drive_power = -1.0;
        assert!(matches!(
            drive_amplitude(&p),
            Err(Error::ParameterDomain { name: "drive_power", .. })
        ));
        p.drive_power = f64::NAN;
        assert!(drive_amplitude(&p).is_err());
    }

    #[test]
    fn thermal_occupation_limits() {
        let omega_m = 2.0 * PI * 5.0e6;
        assert_eq!(thermal_occupation(0.0, omega_m).unwrap(), 0.0);
        // hbar omega / k_B T = ln 2 -> n = 1; = ln 1.5 -> n = 2.
        let t_ln2 = HBAR * omega_m / (K_B * 2f64.ln());
        assert_relative_eq!(thermal_occupation(t_ln2, omega_m).unwrap(), 1.0, max_relative = 1e-12);
        let t_ln15 = HBAR * omega_m / (K_B * 1.5f64.ln());
        assert_relative_eq!(thermal_occupation(t_ln15, omega_m).unwrap(), 2.0, max_relative = 1e-12);
        assert!(thermal_occupation(-1.0, omega_m).is_err());
    }

    #[test]
    fn validation_catches_negative_rates() {
        let mut p = SystemParams::reference();
        assert!(p.validate().is_ok());
        p.gamma_m = -1e-6;
        assert!(p.validate().is_err());
        let mut p = SystemParams::reference();
        p.omega_d = 0.0;
        assert!(p.validate().is_err());
    }
}
