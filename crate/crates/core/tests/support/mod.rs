//! Shared helpers for the integration and acceptance tests.
#![allow(dead_code)]

use num_complex::Complex64;
use optosqueeze::gaussian::{Bath, GaussianModel, LinearLangevin, Mode};
use optosqueeze::meanfield::{mean_field_rhs_with_drive, MeanField};
use optosqueeze::params::drive_amplitude_at;
use optosqueeze::SystemParams;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Dormand-Prince 5(4) coefficients.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive Dormand-Prince integration of `dy/dt = f(y)` from `y` over one
/// interval of length `span`. `h` carries the step size between calls. The
/// last stage of an accepted step is reused as the first of the next.
pub fn dopri5<const N: usize>(
    f: &impl Fn(&[f64; N]) -> [f64; N],
    y: &mut [f64; N],
    span: f64,
    h: &mut f64,
    rtol: f64,
    atol: f64,
) {
    let mut t = 0.0;
    let mut k = [[0.0; N]; 7];
    k[0] = f(y);
    while t < span {
        let step = h.min(span - t);
        for s in 1..7 {
            let mut ys = *y;
            for (r, kr) in k.iter().enumerate().take(s) {
                let a = step * A[s][r];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += a * kr[i];
                    }
                }
            }
            k[s] = f(&ys);
        }
        let mut y5 = *y;
        let mut err = 0.0f64;
        for i in 0..N {
            let (mut d5, mut d4) = (0.0, 0.0);
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y5[i] += step * d5;
            let sc = atol + rtol * y[i].abs().max(y5[i].abs());
            err = err.max((step * (d5 - d4) / sc).abs());
        }
        if err <= 1.0 {
            t += step;
            *y = y5;
            k[0] = k[6];
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        *h = step * factor;
    }
}

fn field(u: &[f64; 6]) -> MeanField {
    MeanField {
        alpha_1: Complex64::new(u[0], u[1]),
        alpha_2: Complex64::new(u[2], u[3]),
        beta: Complex64::new(u[4], u[5]),
    }
}

/// Steady mean field by brute-force time integration from the empty system:
/// integrate one mechanical period at a time until the largest relative change
/// over a period drops below `tol`. Returns `None` if it does not settle by `t_max`.
pub fn integrate_mean_field(params: &SystemParams, power: f64, tol: f64, t_max: f64) -> Option<MeanField> {
    let omega = drive_amplitude_at(params, power).ok()?.omega_drive;
    let drive = Complex64::new(omega, 0.0);
    let f = |u: &[f64; 6]| {
        let r = mean_field_rhs_with_drive(params, drive, &field(u));
        [r[0].re, r[0].im, r[1].re, r[1].im, r[2].re, r[2].im]
    };
    let period = 2.0 * std::f64::consts::PI;
    let mut y = [0.0; 6];
    let mut h = 1e-3;
    let mut t = 0.0;
    while t < t_max {
        let before = field(&y);
        dopri5(&f, &mut y, period, &mut h, 1e-10, 1e-10);
        t += period;
        let after = field(&y);
        let change = [
            (after.alpha_1 - before.alpha_1).norm() / after.alpha_1.norm().max(1e-300),
            (after.alpha_2 - before.alpha_2).norm() / after.alpha_2.norm().max(1e-300),
            (after.beta - before.beta).norm() / after.beta.norm().max(1e-300),
        ];
        if change.iter().all(|c| *c < tol) {
            return Some(after);
        }
    }
    None
}

/// Largest relative difference between two mean fields, taken per amplitude.
pub fn mean_field_rel_diff(a: &MeanField, b: &MeanField) -> f64 {
    [(a.alpha_1, b.alpha_1), (a.alpha_2, b.alpha_2), (a.beta, b.beta)]
        .iter()
        .map(|(x, y)| (x - y).norm() / y.norm().max(1e-300))
        .fold(0.0, f64::max)
}

/// A random physical linear model: Hermitian `h`, symmetric pair term `s`,
/// damping on every mode and thermal baths. Unstable draws are rejected.
pub fn random_stable_model(rng: &mut StdRng, n: usize) -> GaussianModel {
    loop {
        let mut h = vec![Complex64::new(0.0, 0.0); n * n];
        let mut s = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            h[j * n + j] = Complex64::new(rng.random_range(-3.0..3.0), 0.0);
            for k in j..n {
                let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                if k > j {
                    h[j * n + k] = v;
                    h[k * n + j] = v.conj();
                }
                let w = Complex64::new(rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4));
                s[j * n + k] = w;
                s[k * n + j] = w;
            }
        }
        let baths = (0..n)
            .map(|_| Bath {
                rate: rng.random_range(0.05..2.0),
                occupation: rng.random_range(0.0..3.0),
            })
            .collect();
        let modes = (0..n).map(Mode::Other).collect();
        let model = LinearLangevin::from_hamiltonian(modes, &h, &s, baths).to_model();
        if model.max_growth_rate().map(|(g, _)| g < -1e-3).unwrap_or(false) {
            return model;
        }
    }
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
