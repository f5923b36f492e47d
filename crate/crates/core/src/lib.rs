//! Steady-state mechanical squeezing in a double-cavity optomechanical system.
//!
//! A mechanical resonator with a quartic (Duffing) nonlinearity couples by
//! radiation pressure to a strongly driven, heavily damped cavity, which in turn
//! is coupled by photon hopping to a high-Q auxiliary cavity. The crate computes
//! the steady state of this system at four levels of description:
//!
//! * [`meanfield`]: classical steady amplitudes of the three modes, reached by
//!   Newton continuation in drive power;
//! * [`gaussian`]: drift/diffusion matrices of the linearized fluctuations and
//!   their steady (Lyapunov) or transient covariance;
//! * [`reduction`]: adiabatic elimination of the lossy cavity, the squeezing
//!   transformation and the closed-form variance floor `exp(-2 zeta)`;
//! * [`fock`]: a brute-force truncated-Fock Lindblad solver used as an
//!   independent oracle for the Gaussian tier.
//!
//! [`harness`] wires these into the sweeps and reports exposed by the
//! `optosqueeze` binary.
//!
//! ```
//! use optosqueeze::{config::Config, gaussian, meanfield, reduction};
//!
//! let config = Config::reference();
//! let params = &config.system;
//! let steady = meanfield::solve_steady(params, &config.numerics).unwrap();
//! let lin = gaussian::linearize(params, &steady.field);
//! let model = gaussian::build_full_model(params, &lin);
//! let state = gaussian::solve_lyapunov(&model).unwrap();
//! let var_xb = state.variance_x(model.mode_index(gaussian::Mode::Mechanics).unwrap()).unwrap();
//!
//! let eff = reduction::effective_params(&lin, params).unwrap();
//! let zeta = reduction::squeeze_parameter(&eff).unwrap();
//! assert!(var_xb < 1.0);
//! assert!(var_xb >= (-2.0 * zeta).exp() - 1e-3);
//! ```

pub mod config;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod harness;
pub mod linalg;
pub mod meanfield;
pub mod params;
pub mod reduction;

pub use config::{Config, Numerics};
pub use error::{Error, Result};
pub use params::{drive_amplitude, thermal_occupation, DriveAmplitude, SystemParams};

/// Book chapters, compiled as doctests so their snippets stay in sync.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/units.md")]
    pub mod units {}
    #[doc = include_str!("../../../book/src/mean_field.md")]
    pub mod mean_field {}
    #[doc = include_str!("../../../book/src/covariance.md")]
    pub mod covariance {}
    #[doc = include_str!("../../../book/src/reduction.md")]
    pub mod reduction {}
    #[doc = include_str!("../../../book/src/fock_oracle.md")]
    pub mod fock_oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
