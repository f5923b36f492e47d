use faer::Mat;

use super::{CovarianceState, GaussianModel};
use crate::error::{Error, Result};

/// RK4 steps must satisfy `dt <= COVARIANCE_DT_FACTOR / max(|eig A|, |A_ii|)`.
pub const COVARIANCE_DT_FACTOR: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub state: CovarianceState,
}

/// Largest step accepted by [`evolve_covariance`] for this model.
pub fn max_stable_dt(model: &GaussianModel) -> Result<f64> {
    let spectral = model
        .eigenvalues()?
        .iter()
        .map(|e| e.norm())
        .fold(0.0, f64::max);
    let n = model.drift.nrows();
    let rates = (0..n).map(|i| model.drift[(i, i)].abs()).fold(0.0, f64::max);
    let bound = spectral.max(rates);
    Ok(if bound > 0.0 {
        COVARIANCE_DT_FACTOR / bound
    } else {
        f64::INFINITY
    })
}

/// Integrates `dV/dt = A V + V Aᵀ + D` (and `d mean/dt = A mean`) with classical
/// RK4 from `v0` to `t_final`, symmetrizing after every step. The returned
/// trajectory holds `samples` evenly spaced points including both ends (a
/// single point when `t_final == 0`).
pub fn evolve_covariance(
    model: &GaussianModel,
    v0: &CovarianceState,
    t_final: f64,
    dt: f64,
    samples: usize,
) -> Result<Vec<TrajectoryPoint>> {
    let n = model.drift.nrows();
    if v0.cov.nrows() != n || v0.mean.len() != n {
        return Err(Error::Numerics(format!(
            "initial state has dimension {}, model has {n}",
            v0.cov.nrows()
        )));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::domain("t_final", t_final, "must be finite and >= 0"));
    }
    if t_final == 0.0 {
        return Ok(vec![TrajectoryPoint {
            t: 0.0,
            state: v0.clone(),
        }]);
    }
    let limit = max_stable_dt(model)?;
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::Numerics(format!(
            "time step {dt:e} violates the RK4 bound {limit:e}"
        )));
    }
    if samples < 2 {
        return Err(Error::Numerics("a trajectory needs at least two samples".into()));
    }

    let steps = (t_final / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t_final / steps as f64;
    let sample_step = |s: usize| ((s as f64) * steps as f64 / (samples - 1) as f64).round() as usize;

    let a: Vec<f64> = (0..n * n).map(|k| model.drift[(k / n, k % n)]).collect();
    let d: Vec<f64> = (0..n * n).map(|k| model.diffusion[(k / n, k % n)]).collect();
    let mut rk = Rk4::new(n, a, d);
    let mut v: Vec<f64> = (0..n * n).map(|k| v0.cov[(k / n, k % n)]).collect();
    let mut mean = v0.mean.clone();

    let snapshot = |t: f64, v: &[f64], mean: &[f64]| TrajectoryPoint {
        t,
        state: CovarianceState {
            mean: mean.to_vec(),
            cov: Mat::from_fn(n, n, |i, j| v[i * n + j]),
            modes: v0.modes.clone(),
        },
    };

    let mut out = Vec::with_capacity(samples);
    out.push(snapshot(0.0, &v, &mean));
    let mut next_sample = 1;
    for step in 1..=steps {
        rk.step(&mut v, &mut mean, h);
        while next_sample < samples && sample_step(next_sample) == step {
            out.push(snapshot(step as f64 * h, &v, &mean));
            next_sample += 1;
        }
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerics("covariance evolution diverged".into()));
    }
    Ok(out)
}

/// Scratch space for one RK4 step on row-major `n x n` covariances.
struct Rk4 {
    n: usize,
    a: Vec<f64>,
    d: Vec<f64>,
    k: [Vec<f64>; 4],
    km: [Vec<f64>; 4],
    tmp: Vec<f64>,
    tmp_mean: Vec<f64>,
}

impl Rk4 {
    fn new(n: usize, a: Vec<f64>, d: Vec<f64>) -> Self {
        let z = || vec![0.0; n * n];
        let zm = || vec![0.0; n];
        Rk4 {
            n,
            a,
            d,
            k: [z(), z(), z(), z()],
            km: [zm(), zm(), zm(), zm()],
            tmp: z(),
            tmp_mean: zm(),
        }
    }

    /// `out = A v + (A v)ᵀ + D`.
    fn rhs(n: usize, a: &[f64], d: &[f64], v: &[f64], out: &mut [f64]) {
        for i in 0..n {
            let ai = &a[i * n..(i + 1) * n];
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += ai[k] * v[k * n + j];
                }
                out[i * n + j] = s;
            }
        }
        for i in 0..n {
            for j in i..n {
                let s = out[i * n + j] + out[j * n + i];
                out[i * n + j] = s + d[i * n + j];
                out[j * n + i] = s + d[j * n + i];
            }
        }
    }

    fn rhs_mean(n: usize, a: &[f64], m: &[f64], out: &mut [f64]) {
        for i in 0..n {
            out[i] = (0..n).map(|k| a[i * n + k] * m[k]).sum();
        }
    }

    fn step(&mut self, v: &mut [f64], mean: &mut [f64], h: f64) {
        let n = self.n;
        let weights = [0.5, 0.5, 1.0];
        Self::rhs(n, &self.a, &self.d, v, &mut self.k[0]);
        Self::rhs_mean(n, &self.a, mean, &mut self.km[0]);
        for s in 0..3 {
            let w = weights[s] * h;
            for (t, (x, k)) in self.tmp.iter_mut().zip(v.iter().zip(&self.k[s])) {
                *t = x + w * k;
            }
            for (t, (x, k)) in self.tmp_mean.iter_mut().zip(mean.iter().zip(&self.km[s])) {
                *t = x + w * k;
            }
            let (_, rest) = self.k.split_at_mut(s + 1);
            Self::rhs(n, &self.a, &self.d, &self.tmp, &mut rest[0]);
            let (_, rest) = self.km.split_at_mut(s + 1);
            Self::rhs_mean(n, &self.a, &self.tmp_mean, &mut rest[0]);
        }
        let c = h / 6.0;
        for (idx, x) in v.iter_mut().enumerate() {
            *x += c * (self.k[0][idx] + 2.0 * self.k[1][idx] + 2.0 * self.k[2][idx] + self.k[3][idx]);
        }
        for (idx, x) in mean.iter_mut().enumerate() {
            *x += c * (self.km[0][idx] + 2.0 * self.km[1][idx] + 2.0 * self.km[2][idx] + self.km[3][idx]);
        }
        for i in 0..n {
            for j in i + 1..n {
                let avg = 0.5 * (v[i * n + j] + v[j * n + i]);
                v[i * n + j] = avg;
                v[j * n + i] = avg;
            }
        }
    }
}
