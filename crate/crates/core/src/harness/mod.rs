//! Sweeps, reports and the CSV/SVG artifacts behind the command-line tool.

pub mod commands;
pub mod csv;
pub mod svg;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::fock;
use crate::gaussian::{self, Mode};
use crate::meanfield::{self, SteadyState};
use crate::params::SystemParams;
use crate::reduction;

pub use commands::{
    meanfield_sweep, oracle_compare, parameter_sweep, report, variance_evolution,
};
pub use csv::Table;

/// Level of description used to compute the mechanical variance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Tier {
    GaussianFull,
    GaussianEffective,
    FockEffective,
    FockFull,
    Analytic,
}

impl Tier {
    pub const ALL: [Tier; 5] = [
        Tier::GaussianFull,
        Tier::GaussianEffective,
        Tier::FockEffective,
        Tier::FockFull,
        Tier::Analytic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Tier::GaussianFull => "gaussian-full",
            Tier::GaussianEffective => "gaussian-effective",
            Tier::FockEffective => "fock-effective",
            Tier::FockFull => "fock-full",
            Tier::Analytic => "analytic",
        }
    }

    /// Default Fock truncation for the tier, if it needs one.
    pub fn default_dims(&self, config: &Config) -> Option<Vec<usize>> {
        match self {
            Tier::FockEffective => Some(config.numerics.fock_dims_effective.clone()),
            Tier::FockFull => Some(config.numerics.fock_dims_full.clone()),
            _ => None,
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Tier::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Tier::ALL.iter().map(|t| t.name()).collect();
                Error::Config(format!("unknown tier `{s}`; expected one of {}", names.join(", ")))
            })
    }
}

/// Parses `START:STOP:N` into `N` evenly spaced values.
pub fn parse_linspace(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Config(format!("grid `{spec}` is not START:STOP:N"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 {
        return Err(Error::Config("grid needs at least one point".into()));
    }
    if n == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (n - 1) as f64;
    Ok((0..n)
        .map(|k| if k == n - 1 { stop } else { start + step * k as f64 })
        .collect())
}

/// Parses `v1,v2,...`.
pub fn parse_list(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("grid value `{}` is not a number", v.trim())))
        })
        .collect()
}

/// Sets a named [`SystemParams`] field (rates in units of `omega_m`).
pub fn set_param(params: &mut SystemParams, name: &str, value: f64) -> Result<()> {
    let slot = match name {
        "omega_m" => &mut params.omega_m,
        "delta_1" => &mut params.delta_1,
        "delta_2" => &mut params.delta_2,
        "coupling_j" => &mut params.coupling_j,
        "coupling_g" => &mut params.coupling_g,
        "duffing_eta" => &mut params.duffing_eta,
        "kappa_1" => &mut params.kappa_1,
        "kappa_2" => &mut params.kappa_2,
        "gamma_m" => &mut params.gamma_m,
        "n_th" => &mut params.n_th,
        "drive_power" => &mut params.drive_power,
        "omega_d" => &mut params.omega_d,
        other => return Err(Error::Config(format!("`{other}` is not a system parameter"))),
    };
    *slot = value;
    Ok(())
}

/// One parameter scan: which field, over which values, at which tier.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub parameter: String,
    pub grid: Vec<f64>,
    pub tier: Tier,
}

impl SweepSpec {
    pub fn new(parameter: &str, grid: Vec<f64>, tier: Tier) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        if grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("sweep grid contains a non-finite value".into()));
        }
        if grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config("sweep grid must be sorted ascending".into()));
        }
        set_param(&mut SystemParams::reference(), parameter, 0.0)?;
        Ok(SweepSpec {
            parameter: parameter.to_string(),
            grid,
            tier,
        })
    }
}

/// Outcome of one sweep point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointResult {
    pub var_xb: f64,
    pub zeta: f64,
    pub var_floor: f64,
    pub alpha1_abs: f64,
    pub beta_abs: f64,
    pub stable: bool,
    pub status: String,
}

impl PointResult {
    fn failed(status: String) -> Self {
        PointResult {
            var_xb: f64::NAN,
            zeta: f64::NAN,
            var_floor: f64::NAN,
            alpha1_abs: f64::NAN,
            beta_abs: f64::NAN,
            stable: false,
            status,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Short CSV-safe code for an error.
pub fn status_code(err: &Error) -> &'static str {
    match err {
        Error::ParameterDomain { .. } => "parameter-domain",
        Error::ContinuationFailure { .. } => "continuation-failure",
        Error::Unstable { .. } => "unstable",
        Error::SingularElimination => "singular-elimination",
        Error::InvertedPotential { .. } => "inverted-potential",
        Error::Capacity { .. } => "capacity",
        Error::DegenerateSteadyState(_) => "degenerate-steady-state",
        Error::Numerics(_) => "numerics",
        Error::IndexOutOfRange { .. } => "index",
        Error::Config(_) => "config",
        Error::Io(_) => "io",
    }
}

/// Mean field, linearization and elimination at one parameter set.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub steady: SteadyState,
    pub lin: gaussian::LinearizedParams,
    pub eff: reduction::EffectiveParams,
}

impl Pipeline {
    pub fn new(params: &SystemParams, config: &Config) -> Result<Self> {
        let steady = meanfield::solve_steady(params, &config.numerics)?;
        let lin = gaussian::linearize(params, &steady.field);
        let eff = reduction::effective_params(&lin, params)?;
        Ok(Pipeline { steady, lin, eff })
    }
}

/// Steady `Var(X_b)` at one tier. Unstable drift gives `Err(Unstable)`.
pub fn steady_variance(
    params: &SystemParams,
    config: &Config,
    pipe: &Pipeline,
    tier: Tier,
    dims: Option<&[usize]>,
) -> Result<f64> {
    let budget = config.numerics.max_superop_nnz;
    let default_dims = tier.default_dims(config);
    let dims = dims.or(default_dims.as_deref());
    match tier {
        Tier::GaussianFull => {
            let model = gaussian::build_full_model(params, &pipe.lin);
            let state = gaussian::solve_lyapunov(&model)?;
            state.variance_x(model.mode_index(Mode::Mechanics).expect("mechanics present"))
        }
        Tier::GaussianEffective => {
            let model = gaussian::build_effective_model(&pipe.eff, params);
            let state = gaussian::solve_lyapunov(&model)?;
            state.variance_x(model.mode_index(Mode::Mechanics).expect("mechanics present"))
        }
        Tier::FockEffective => {
            let model = gaussian::build_effective_model(&pipe.eff, params);
            let (growth, eigenvalue) = model.max_growth_rate()?;
            if growth >= 0.0 {
                return Err(Error::Unstable { eigenvalue });
            }
            let l = fock::build_liouvillian_effective(&pipe.eff, params, dims.expect("fock dims"), budget)?;
            fock_variance(&l, config)
        }
        Tier::FockFull => {
            if !pipe.steady.stable {
                let (_, eigenvalue) = gaussian::build_full_model(params, &pipe.lin).max_growth_rate()?;
                return Err(Error::Unstable { eigenvalue });
            }
            let l = fock::build_liouvillian_full(&pipe.lin, params, dims.expect("fock dims"), budget)?;
            fock_variance(&l, config)
        }
        Tier::Analytic => {
            let zeta = reduction::squeeze_parameter(&pipe.eff)?;
            let tp = reduction::transformed_params(&pipe.eff, zeta, params.n_th);
            let n = reduction::cooling_residual_occupation(&pipe.eff, &tp, params)?;
            Ok(reduction::analytic_variance(n, zeta))
        }
    }
}

fn fock_variance(l: &fock::Liouvillian, config: &Config) -> Result<f64> {
    let out = fock::steady_state(l, config.numerics.gmres())?;
    let report = fock::truncation_diagnostic(&out.rho, l.dims());
    if !report.adequate {
        log::warn!(
            "Fock truncation {:?} keeps {:e} in the top levels; try {:?}",
            l.dims(),
            report.max_boundary_population(),
            report.suggested_dims
        );
    }
    Ok(fock::moments(&out.rho, &l.ops).modes[l.mechanical_mode()].var_x)
}

/// Evaluates one sweep point. Never fails: errors become the row status.
pub fn evaluate_point(params: &SystemParams, config: &Config, tier: Tier, dims: Option<&[usize]>) -> PointResult {
    let pipe = match Pipeline::new(params, config) {
        Ok(p) => p,
        Err(e) => return PointResult::failed(status_code(&e).to_string()),
    };
    let zeta = reduction::squeeze_parameter(&pipe.eff).unwrap_or(f64::NAN);
    let base = PointResult {
        var_xb: f64::NAN,
        zeta,
        var_floor: (-2.0 * zeta).exp(),
        alpha1_abs: pipe.steady.field.alpha_1.norm(),
        beta_abs: pipe.steady.field.beta.norm(),
        stable: pipe.steady.stable,
        status: "ok".into(),
    };
    match steady_variance(params, config, &pipe, tier, dims) {
        Ok(v) => PointResult { var_xb: v, ..base },
        Err(Error::Unstable { .. }) => PointResult {
            var_xb: f64::INFINITY,
            stable: false,
            status: "unstable".into(),
            ..base
        },
        Err(e) => PointResult {
            status: status_code(&e).into(),
            ..base
        },
    }
}
