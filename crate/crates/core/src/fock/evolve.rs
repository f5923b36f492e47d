use faer::Mat;
use num_complex::Complex64;
use serde::Serialize;

use super::{moments, truncation_diagnostic, unvectorize, vectorize, Liouvillian, MomentRecord};
use crate::error::{Error, Result};

/// RK4 is stable for `dt * rho(L) <= 2.78`; `||L||_inf` bounds the spectral radius.
pub const RK4_STABILITY_LIMIT: f64 = 2.8;
const TRACE_DRIFT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FockSample {
    pub t: f64,
    pub moments: MomentRecord,
    /// `|tr ρ - 1|`.
    pub trace_err: f64,
    pub boundary_pop_max: f64,
}

/// `factor / ||L||_inf`.
pub fn max_stable_dt(l: &Liouvillian, factor: f64) -> f64 {
    factor / l.superop.norm_inf()
}

/// Integrates `dρ/dt = L ρ` with classical RK4 and samples moments at
/// `samples` evenly spaced times including both ends.
pub fn evolve(
    l: &Liouvillian,
    rho0: &Mat<Complex64>,
    t_final: f64,
    dt: f64,
    samples: usize,
) -> Result<Vec<FockSample>> {
    let d = l.dim();
    if rho0.nrows() != d || rho0.ncols() != d {
        return Err(Error::Numerics(format!("initial state is {}x{}, space has dimension {d}", rho0.nrows(), rho0.ncols())));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::domain("t_final", t_final, "must be finite and >= 0"));
    }
    let sample = |t: f64, v: &[Complex64]| {
        let rho = unvectorize(v, d);
        let m = moments(&rho, &l.ops);
        FockSample {
            t,
            trace_err: (m.trace - 1.0).abs(),
            boundary_pop_max: truncation_diagnostic(&rho, l.dims()).max_boundary_population(),
            moments: m,
        }
    };
    let mut y = vectorize(rho0);
    if t_final == 0.0 {
        return Ok(vec![sample(0.0, &y)]);
    }
    let norm = l.superop.norm_inf();
    if !(dt > 0.0) || dt * norm > RK4_STABILITY_LIMIT {
        return Err(Error::Numerics(format!(
            "time step {dt:e} times ||L|| = {norm:e} exceeds the RK4 limit {RK4_STABILITY_LIMIT}"
        )));
    }
    if samples < 2 {
        return Err(Error::Numerics("a trajectory needs at least two samples".into()));
    }
    let steps = (t_final / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t_final / steps as f64;
    let sample_step = |s: usize| ((s as f64) * steps as f64 / (samples - 1) as f64).round() as usize;

    let n = d * d;
    let zero = Complex64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
    let mut out = vec![sample(0.0, &y)];
    let mut next = 1;
    for step in 1..=steps {
        l.apply(&y, &mut k1);
        axpy(&mut tmp, &y, 0.5 * h, &k1);
        l.apply(&tmp, &mut k2);
        axpy(&mut tmp, &y, 0.5 * h, &k2);
        l.apply(&tmp, &mut k3);
        axpy(&mut tmp, &y, h, &k3);
        l.apply(&tmp, &mut k4);
        let c = h / 6.0;
        for i in 0..n {
            y[i] += c * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        while next < samples && sample_step(next) == step {
            let s = sample(step as f64 * h, &y);
            if s.trace_err > TRACE_DRIFT_TOL {
                return Err(Error::Numerics(format!("trace drifted by {:e} at t = {}", s.trace_err, s.t)));
            }
            out.push(s);
            next += 1;
        }
    }
    Ok(out)
}

fn axpy(out: &mut [Complex64], y: &[Complex64], a: f64, k: &[Complex64]) {
    for ((o, yi), ki) in out.iter_mut().zip(y).zip(k) {
        *o = yi + a * ki;
    }
}
