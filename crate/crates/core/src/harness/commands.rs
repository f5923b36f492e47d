use std::fmt::Write;

use rayon::prelude::*;

use super::csv::{cell, num, Table};
use super::svg::{line_plot, Series};
use super::{evaluate_point, set_param, status_code, Pipeline, SweepSpec, Tier};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::fock;
use crate::gaussian::{self, CovarianceState, GaussianModel, Mode};
use crate::meanfield;
use crate::params::drive_amplitude;
use crate::reduction;

/// A CSV table and an SVG rendering of it.
#[derive(Clone, Debug)]
pub struct Output {
    pub table: Table,
    pub svg: String,
}

fn column_points(table: &Table, x: &str, y: &str) -> Vec<(f64, f64)> {
    let xs = table.numeric_column(x).unwrap_or_default();
    let ys = table.numeric_column(y).unwrap_or_default();
    xs.into_iter().zip(ys).collect()
}

/// Mean-field amplitudes along an ascending power grid (watts).
pub fn meanfield_sweep(config: &Config, grid: &[f64]) -> Result<Output> {
    let rows = meanfield::sweep_power(&config.system, &config.numerics, grid)?;
    let mut table = Table::new(&[
        "P_watt", "alpha1_re", "alpha1_im", "alpha2_re", "alpha2_im", "beta_re", "beta_im",
        "alpha1_abs", "alpha2_abs", "beta_abs", "stable", "status",
    ]);
    for (&p, row) in grid.iter().zip(rows) {
        match row {
            Ok(s) => {
                let f = s.field;
                table.push(vec![
                    num(p),
                    num(f.alpha_1.re),
                    num(f.alpha_1.im),
                    num(f.alpha_2.re),
                    num(f.alpha_2.im),
                    num(f.beta.re),
                    num(f.beta.im),
                    num(f.alpha_1.norm()),
                    num(f.alpha_2.norm()),
                    num(f.beta.norm()),
                    cell(s.stable),
                    "ok".into(),
                ]);
            }
            Err(e) => {
                table.failed_rows += 1;
                let mut row = vec![num(p)];
                row.extend(std::iter::repeat_n(num(f64::NAN), 9));
                row.push(cell(false));
                row.push(status_code(&e).into());
                table.push(row);
            }
        }
    }
    let series = ["alpha1_abs", "alpha2_abs", "beta_abs"]
        .iter()
        .map(|c| Series {
            name: c.to_string(),
            points: column_points(&table, "P_watt", c),
        })
        .collect::<Vec<_>>();
    let svg = line_plot("steady amplitudes", "P (W)", "amplitude", &series);
    Ok(Output { table, svg })
}

fn sweep_column_name(parameter: &str) -> String {
    match parameter {
        "coupling_j" => "J_omega_m".into(),
        "drive_power" => "P_watt".into(),
        other => other.into(),
    }
}

/// Steady `Var(X_b)` along a parameter grid, one independent solve per point,
/// evaluated on `workers` threads. Rows keep grid order.
pub fn parameter_sweep(config: &Config, spec: &SweepSpec, dims: Option<&[usize]>, workers: usize) -> Result<Output> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Numerics(format!("worker pool: {e}")))?;
    let points: Vec<_> = pool.install(|| {
        spec.grid
            .par_iter()
            .map(|&v| {
                let mut params = config.system.clone();
                set_param(&mut params, &spec.parameter, v)?;
                Ok(evaluate_point(&params, config, spec.tier, dims))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let x_col = sweep_column_name(&spec.parameter);
    let mut table = Table::new(&[
        &x_col, "tier", "var_Xb", "zeta", "var_floor", "alpha1_abs", "beta_abs", "stable", "status",
    ]);
    table.comments.push(format!("tier={}", spec.tier));
    if let Some(d) = dims {
        table.comments.push(format!("fock_dims={d:?}"));
    }
    for (&v, p) in spec.grid.iter().zip(&points) {
        if !p.is_ok() {
            table.failed_rows += 1;
        }
        table.push(vec![
            num(v),
            spec.tier.to_string(),
            num(p.var_xb),
            num(p.zeta),
            num(p.var_floor),
            num(p.alpha1_abs),
            num(p.beta_abs),
            cell(p.stable),
            p.status.clone(),
        ]);
    }
    let series = vec![
        Series {
            name: format!("Var(X_b) [{}]", spec.tier),
            points: column_points(&table, &x_col, "var_Xb"),
        },
        Series {
            name: "exp(-2 zeta)".into(),
            points: column_points(&table, &x_col, "var_floor"),
        },
    ];
    let svg = line_plot("steady mechanical variance", &x_col, "Var(X_b)", &series);
    Ok(Output { table, svg })
}

fn gaussian_trajectory(
    model: &GaussianModel,
    t_final: f64,
    samples: usize,
    tier: Tier,
) -> Result<Table> {
    let (growth, eigenvalue) = model.max_growth_rate()?;
    if growth >= 0.0 {
        return Err(Error::Unstable { eigenvalue });
    }
    let steady = gaussian::solve_lyapunov(model)?;
    let dt = gaussian::max_stable_dt(model)?;
    let v0 = CovarianceState::vacuum(model.modes.clone());
    let traj = gaussian::evolve_covariance(model, &v0, t_final, dt, samples)?;
    let b = model.mode_index(Mode::Mechanics).expect("mechanics present");
    let var = |s: &CovarianceState, m: Mode| {
        model
            .mode_index(m)
            .map(|k| s.variance_x(k).unwrap_or(f64::NAN))
            .unwrap_or(f64::NAN)
    };
    let mut table = Table::new(&["t_omega_m", "var_Xb", "var_Yb", "var_X1", "var_X2", "purity_b"]);
    for p in &traj {
        let s = &p.state;
        table.push(vec![
            num(p.t),
            num(s.variance_x(b)?),
            num(s.variance_y(b)?),
            num(var(s, Mode::Cavity1)),
            num(var(s, Mode::Cavity2)),
            num(s.purity(b)?),
        ]);
    }
    let steady_var = steady.variance_x(b)?;
    let final_var = traj.last().expect("non-empty trajectory").state.variance_x(b)?;
    push_settling_comments(&mut table, tier, steady_var, final_var);
    Ok(table)
}

fn push_settling_comments(table: &mut Table, tier: Tier, steady: f64, last: f64) {
    table.comments.push(format!("tier={tier}"));
    table.comments.push(format!("steady_var_Xb={steady}"));
    table.comments.push(format!("final_var_Xb={last}"));
    table.comments.push(format!("final_rel_diff={}", ((last - steady) / steady).abs()));
}

/// `Var(X_b)(t)` from the ground state up to `t_final` (units of `1/omega_m`).
pub fn variance_evolution(config: &Config, tier: Tier, t_final: f64, dims: Option<&[usize]>) -> Result<Output> {
    let params = &config.system;
    let pipe = Pipeline::new(params, config)?;
    let samples = config.numerics.trajectory_samples;
    let table = match tier {
        Tier::GaussianFull => {
            gaussian_trajectory(&gaussian::build_full_model(params, &pipe.lin), t_final, samples, tier)?
        }
        Tier::GaussianEffective => {
            gaussian_trajectory(&gaussian::build_effective_model(&pipe.eff, params), t_final, samples, tier)?
        }
        Tier::FockEffective => {
            let model = gaussian::build_effective_model(&pipe.eff, params);
            let (growth, eigenvalue) = model.max_growth_rate()?;
            if growth >= 0.0 {
                return Err(Error::Unstable { eigenvalue });
            }
            let default_dims = config.numerics.fock_dims_effective.clone();
            let dims = dims.unwrap_or(&default_dims);
            let l = fock::build_liouvillian_effective(&pipe.eff, params, dims, config.numerics.max_superop_nnz)?;
            let steady = fock::steady_state(&l, config.numerics.gmres())?;
            let b = l.mechanical_mode();
            let steady_var = fock::moments(&steady.rho, &l.ops).modes[b].var_x;
            let dt = fock::max_stable_dt(&l, config.numerics.fock_dt_factor);
            let traj = fock::evolve(&l, &fock::ground_state(l.dim()), t_final, dt, samples)?;
            let mut table = Table::new(&["t_omega_m", "var_Xb", "mean_Xb", "occ_b", "trace_err", "boundary_pop_max"]);
            for s in &traj {
                let m = &s.moments.modes[b];
                table.push(vec![
                    num(s.t),
                    num(m.var_x),
                    num(m.mean_x),
                    num(m.occupation),
                    num(s.trace_err),
                    num(s.boundary_pop_max),
                ]);
            }
            let last = traj.last().expect("non-empty trajectory").moments.modes[b].var_x;
            push_settling_comments(&mut table, tier, steady_var, last);
            table.comments.push(format!("fock_dims={dims:?}"));
            table
        }
        other => {
            return Err(Error::Config(format!(
                "tier `{other}` has no time evolution; use gaussian-full, gaussian-effective or fock-effective"
            )))
        }
    };
    let series = vec![Series {
        name: format!("Var(X_b) [{tier}]"),
        points: column_points(&table, "t_omega_m", "var_Xb"),
    }];
    let svg = line_plot("mechanical variance from the ground state", "omega_m t", "Var(X_b)", &series);
    Ok(Output { table, svg })
}

/// Flat `key = value` listing of every derived quantity at the configured
/// operating point, each labelled with its defining formula.
pub fn report(config: &Config) -> Result<String> {
    let p = &config.system;
    let drive = drive_amplitude(p)?;
    let pipe = Pipeline::new(p, config)?;
    let (lin, eff, mf) = (&pipe.lin, &pipe.eff, &pipe.steady);
    let zeta = reduction::squeeze_parameter(eff)?;
    let tp = reduction::transformed_params(eff, zeta, p.n_th);
    let det = reduction::optimal_detuning_report(eff, &tp);

    let mut out = String::new();
    let _ = writeln!(out, "# optosqueeze {} config_sha256={}", super::csv::VERSION, config.hash());
    let mut line = |key: &str, value: f64, formula: &str| {
        let _ = writeln!(out, "{key} = {value}    # {formula}");
    };
    line("drive_power_W", p.drive_power, "input");
    line("Omega_d", drive.omega_drive, "sqrt(2 P kappa_1 / (hbar omega_d)) / omega_m");
    line("alpha1_abs", mf.field.alpha_1.norm(), "mean-field root");
    line("alpha2_abs", mf.field.alpha_2.norm(), "mean-field root");
    line("beta_re", mf.field.beta.re, "mean-field root");
    line("beta_im", mf.field.beta.im, "mean-field root");
    line("beta_abs", mf.field.beta.norm(), "mean-field root");
    line("max_growth_rate", mf.max_growth_rate, "max Re eig(A), full three-mode drift");
    line("Delta_1", lin.delta_1, "delta_1 + g (beta + beta*)");
    line("Lambda", lin.lambda, "3 eta (4 |beta|^2 + 1)");
    line("omega_m_tilde", lin.omega_m_tilde, "omega_m + 2 Lambda");
    line("G", lin.coupling, "g |alpha_1|");
    line("Lambda_prime", eff.lambda_prime, "Lambda + G^2 Delta_1 / (Delta_1^2 + kappa_1^2/4)");
    line("omega_m_tilde_prime", eff.omega_m_tilde_prime, "omega_m + 2 Lambda'");
    line("G_eff", eff.g_eff, "|G J / (Delta_1 + i kappa_1/2)|");
    line("Delta_eff", eff.delta_eff, "delta_2 - J^2 Delta_1 / (Delta_1^2 + kappa_1^2/4)");
    line("kappa_eff", eff.kappa_eff, "kappa_2 + J^2 kappa_1 / (Delta_1^2 + kappa_1^2/4)");
    line("zeta", zeta, "ln(1 + 4 Lambda'/omega_m) / 4");
    line("omega_m_prime", tp.omega_m_prime, "omega_m sqrt(1 + 4 Lambda'/omega_m)");
    line("G_prime", tp.g_prime, "G_eff (1 + 4 Lambda'/omega_m)^(-1/4)");
    line("n_th_prime", tp.n_th_prime, "n_th cosh(2 zeta) + sinh^2(zeta)");
    line("var_floor", reduction::analytic_variance(0.0, zeta), "exp(-2 zeta)");
    match reduction::cooling_residual_occupation(eff, &tp, p) {
        Ok(n) => {
            line("n_eff_prime", n, "steady phonon number of the transformed two-mode model");
            line("var_analytic", reduction::analytic_variance(n, zeta), "(2 n_eff' + 1) exp(-2 zeta)");
        }
        Err(e) => line("n_eff_prime", f64::NAN, status_code(&e)),
    }
    line("optimal_detuning", det.optimal, "-omega_m', best cooling in the squeezed frame");
    line("detuning_mismatch", det.mismatch, "Delta_eff - (-omega_m')");
    for (name, tier) in [("var_Xb_gaussian_full", Tier::GaussianFull), ("var_Xb_gaussian_effective", Tier::GaussianEffective)] {
        match super::steady_variance(p, config, &pipe, tier, None) {
            Ok(v) => line(name, v, "steady Lyapunov covariance"),
            Err(e) => line(name, f64::INFINITY, status_code(&e)),
        }
    }
    Ok(out)
}

/// Fock steady state against the Gaussian tier it approximates.
pub fn oracle_compare(config: &Config, tier: Tier, dims: Option<&[usize]>) -> Result<String> {
    let p = &config.system;
    let pipe = Pipeline::new(p, config)?;
    let budget = config.numerics.max_superop_nnz;
    let default_dims = tier.default_dims(config);
    let dims = dims
        .or(default_dims.as_deref())
        .ok_or_else(|| Error::Config(format!("oracle-compare needs a Fock tier, got `{tier}`")))?;
    let (l, reference) = match tier {
        Tier::FockEffective => (
            fock::build_liouvillian_effective(&pipe.eff, p, dims, budget)?,
            Tier::GaussianEffective,
        ),
        Tier::FockFull => (fock::build_liouvillian_full(&pipe.lin, p, dims, budget)?, Tier::GaussianFull),
        _ => unreachable!("only Fock tiers have default dims"),
    };
    let gaussian_var = super::steady_variance(p, config, &pipe, reference, None)?;
    let steady = fock::steady_state(&l, config.numerics.gmres())?;
    let b = l.mechanical_mode();
    let m = fock::moments(&steady.rho, &l.ops);
    let diag = fock::truncation_diagnostic(&steady.rho, l.dims());
    let mut out = String::new();
    let _ = writeln!(out, "# optosqueeze {} config_sha256={}", super::csv::VERSION, config.hash());
    let _ = writeln!(out, "tier = {tier}");
    let _ = writeln!(out, "reference_tier = {reference}");
    let _ = writeln!(out, "dims = {dims:?}");
    let _ = writeln!(out, "superop_nnz = {}", l.superop.nnz());
    let _ = writeln!(out, "gmres_iterations = {}", steady.iterations);
    let _ = writeln!(out, "steady_residual = {}", steady.residual);
    let _ = writeln!(out, "min_rho_eigenvalue = {}", fock::min_eigenvalue(&steady.rho)?);
    let _ = writeln!(out, "var_Xb_gaussian = {gaussian_var}");
    let _ = writeln!(out, "var_Xb_fock = {}", m.modes[b].var_x);
    let _ = writeln!(out, "var_Yb_fock = {}", m.modes[b].var_y);
    let _ = writeln!(out, "occ_b_fock = {}", m.modes[b].occupation);
    let _ = writeln!(out, "rel_gap = {}", ((m.modes[b].var_x - gaussian_var) / gaussian_var).abs());
    let _ = writeln!(out, "boundary_populations = {:?}", diag.boundary_populations);
    let _ = writeln!(out, "truncation_adequate = {}", diag.adequate);
    let _ = writeln!(out, "suggested_dims = {:?}", diag.suggested_dims);
    Ok(out)
}
