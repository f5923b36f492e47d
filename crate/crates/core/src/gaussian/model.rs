use faer::Mat;
use num_complex::Complex64;

use super::{LinearizedParams, I};
use crate::error::Result;
use crate::linalg;
use crate::params::SystemParams;
use crate::reduction::{EffectiveParams, TransformedParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Cavity1,
    Cavity2,
    Mechanics,
    /// Unnamed mode of a hand-built model.
    Other(usize),
}

impl Mode {
    pub fn label(&self) -> String {
        match self {
            Mode::Cavity1 => "a1".into(),
            Mode::Cavity2 => "a2".into(),
            Mode::Mechanics => "b".into(),
            Mode::Other(k) => format!("m{k}"),
        }
    }
}

/// Markovian bath attached to one mode: damping `rate` and occupation `occupation`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bath {
    pub rate: f64,
    pub occupation: f64,
}

/// Linear quantum Langevin equations
/// `d a_j/dt = sum_k M_jk a_k + N_jk a_k† + noise_j`
/// with independent Markovian baths.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearLangevin {
    pub modes: Vec<Mode>,
    /// Row-major `n x n`.
    pub m: Vec<Complex64>,
    /// Row-major `n x n`.
    pub n: Vec<Complex64>,
    pub baths: Vec<Bath>,
}

impl LinearLangevin {
    /// Equations generated by the quadratic Hamiltonian
    /// `H = sum h_jk a_j† a_k + (1/2) sum (s_jk a_j† a_k† + h.c.)`
    /// plus damping `rate_j / 2` on each mode. `h` must be Hermitian and `s`
    /// symmetric (row-major).
    pub fn from_hamiltonian(modes: Vec<Mode>, h: &[Complex64], s: &[Complex64], baths: Vec<Bath>) -> Self {
        let n = modes.len();
        let mut m: Vec<Complex64> = h.iter().map(|v| -I * v).collect();
        for (j, bath) in baths.iter().enumerate() {
            m[j * n + j] -= bath.rate / 2.0;
        }
        LinearLangevin {
            modes,
            m,
            n: s.iter().map(|v| -I * v).collect(),
            baths,
        }
    }

    /// Real drift and diffusion in the quadrature basis.
    pub fn to_model(&self) -> GaussianModel {
        let n = self.modes.len();
        let mut drift = Mat::<f64>::zeros(2 * n, 2 * n);
        for j in 0..n {
            for k in 0..n {
                let (mjk, njk) = (self.m[j * n + k], self.n[j * n + k]);
                let sum = mjk + njk;
                let diff = mjk - njk;
                // With a = (X + iY)/2: dX_j = 2 Re(da_j), dY_j = 2 Im(da_j).
                drift[(2 * j, 2 * k)] = sum.re;
                drift[(2 * j, 2 * k + 1)] = -diff.im;
                drift[(2 * j + 1, 2 * k)] = sum.im;
                drift[(2 * j + 1, 2 * k + 1)] = diff.re;
            }
        }
        let mut diffusion = Mat::<f64>::zeros(2 * n, 2 * n);
        for (j, bath) in self.baths.iter().enumerate() {
            let d = bath.rate * (2.0 * bath.occupation + 1.0);
            diffusion[(2 * j, 2 * j)] = d;
            diffusion[(2 * j + 1, 2 * j + 1)] = d;
        }
        GaussianModel {
            drift,
            diffusion,
            modes: self.modes.clone(),
        }
    }
}

/// Drift `A` and diffusion `D` of `dV/dt = A V + V Aᵀ + D`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianModel {
    pub drift: Mat<f64>,
    pub diffusion: Mat<f64>,
    pub modes: Vec<Mode>,
}

impl GaussianModel {
    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn mode_index(&self, mode: Mode) -> Option<usize> {
        self.modes.iter().position(|&m| m == mode)
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        linalg::eigenvalues(&self.drift)
    }

    /// Largest real part of the drift spectrum and the eigenvalue carrying it.
    pub fn max_growth_rate(&self) -> Result<(f64, Complex64)> {
        let eig = self.eigenvalues()?;
        let worst = eig
            .into_iter()
            .max_by(|a, b| a.re.total_cmp(&b.re))
            .unwrap_or_default();
        Ok((worst.re, worst))
    }

    pub fn is_stable(&self) -> Result<bool> {
        Ok(self.max_growth_rate()?.0 < 0.0)
    }

    /// Row-major plain-text dump of drift and diffusion.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (name, m) in [("drift", &self.drift), ("diffusion", &self.diffusion)] {
            out.push_str(name);
            out.push('\n');
            for i in 0..m.nrows() {
                let row: Vec<String> = (0..m.ncols()).map(|j| format!("{}", m[(i, j)])).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        out
    }
}

fn vacuum_or_thermal(rate: f64, occupation: f64) -> Bath {
    Bath { rate, occupation }
}

/// Three-mode model `(a1, a2, b)` of the linearized fluctuations.
pub fn build_full_model(params: &SystemParams, lin: &LinearizedParams) -> GaussianModel {
    full_langevin(params, lin).to_model()
}

pub(crate) fn full_langevin(params: &SystemParams, lin: &LinearizedParams) -> LinearLangevin {
    let z = Complex64::new(0.0, 0.0);
    let g = lin.coupling;
    let j = params.coupling_j;
    #[rustfmt::skip]
    let m = vec![
        I * lin.delta_1 - params.kappa_1 / 2.0, -I * j, I * g,
        -I * j, I * params.delta_2 - params.kappa_2 / 2.0, z,
        I * g, z, -I * lin.omega_m_tilde - params.gamma_m / 2.0,
    ];
    #[rustfmt::skip]
    let n = vec![
        z, z, I * g,
        z, z, z,
        I * g, z, -2.0 * I * lin.lambda,
    ];
    LinearLangevin {
        modes: vec![Mode::Cavity1, Mode::Cavity2, Mode::Mechanics],
        m,
        n,
        baths: vec![
            vacuum_or_thermal(params.kappa_1, 0.0),
            vacuum_or_thermal(params.kappa_2, 0.0),
            vacuum_or_thermal(params.gamma_m, params.n_th),
        ],
    }
}

/// Two-mode model `(a2, b)` left after eliminating cavity 1.
pub fn build_effective_model(eff: &EffectiveParams, params: &SystemParams) -> GaussianModel {
    let g = eff.g_eff;
    let z = Complex64::new(0.0, 0.0);
    LinearLangevin {
        modes: vec![Mode::Cavity2, Mode::Mechanics],
        m: vec![
            I * eff.delta_eff - eff.kappa_eff / 2.0,
            I * g,
            I * g,
            -I * eff.omega_m_tilde_prime - params.gamma_m / 2.0,
        ],
        n: vec![z, I * g, I * g, -2.0 * I * eff.lambda_prime],
        baths: vec![
            vacuum_or_thermal(eff.kappa_eff, 0.0),
            vacuum_or_thermal(params.gamma_m, params.n_th),
        ],
    }
    .to_model()
}

/// Two-mode model in the squeezed frame: position coupling `G'`, mechanical
/// frequency `omega_m'` and bath occupation `n_th'`.
pub fn build_transformed_model(
    tp: &TransformedParams,
    eff: &EffectiveParams,
    params: &SystemParams,
) -> GaussianModel {
    let g = tp.g_prime;
    let z = Complex64::new(0.0, 0.0);
    LinearLangevin {
        modes: vec![Mode::Cavity2, Mode::Mechanics],
        m: vec![
            I * eff.delta_eff - eff.kappa_eff / 2.0,
            I * g,
            I * g,
            -I * tp.omega_m_prime - params.gamma_m / 2.0,
        ],
        n: vec![z, I * g, I * g, z],
        baths: vec![
            vacuum_or_thermal(eff.kappa_eff, 0.0),
            vacuum_or_thermal(params.gamma_m, tp.n_th_prime),
        ],
    }
    .to_model()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lin() -> LinearizedParams {
        LinearizedParams {
            delta_1: 50.3,
            omega_m_tilde: 1.0 + 2.0 * 1.7,
            lambda: 1.7,
            coupling: 0.41,
        }
    }

    /// The drift applied to a quadrature vector must reproduce the real and
    /// imaginary parts of the complex fluctuation equations, expanded by hand.
    #[test]
    fn drift_reproduces_hand_expanded_equations() {
        let p = SystemParams::reference();
        let l = lin();
        let model = build_full_model(&p, &l);
        let u = [0.3, -1.1, 0.7, 0.2, -0.4, 0.9];
        let [x1, y1, x2, y2, xb, yb] = u;
        let (k1, k2, gm) = (p.kappa_1 / 2.0, p.kappa_2 / 2.0, p.gamma_m / 2.0);
        let (j, g, lam, w) = (p.coupling_j, l.coupling, l.lambda, l.omega_m_tilde);
        let expect = [
            -k1 * x1 - l.delta_1 * y1 + j * y2,
            l.delta_1 * x1 - k1 * y1 - j * x2 + 2.0 * g * xb,
            -k2 * x2 - p.delta_2 * y2 + j * y1,
            p.delta_2 * x2 - k2 * y2 - j * x1,
            -gm * xb + (w - 2.0 * lam) * yb,
            -(w + 2.0 * lam) * xb - gm * yb + 2.0 * g * x1,
        ];
        for r in 0..6 {
            let got: f64 = (0..6).map(|c| model.drift[(r, c)] * u[c]).sum();
            assert_relative_eq!(got, expect[r], epsilon = 1e-12);
        }
    }

    #[test]
    fn literal_equations_match_the_quadratic_hamiltonian() {
        let p = SystemParams::reference();
        let l = lin();
        let c = |v: f64| Complex64::new(v, 0.0);
        let z = c(0.0);
        let g = l.coupling;
        #[rustfmt::skip]
        let h = [
            c(-l.delta_1), c(p.coupling_j), c(-g),
            c(p.coupling_j), c(-p.delta_2), z,
            c(-g), z, c(l.omega_m_tilde),
        ];
        #[rustfmt::skip]
        let s = [
            z, z, c(-g),
            z, z, z,
            c(-g), z, c(2.0 * l.lambda),
        ];
        let from_h = LinearLangevin::from_hamiltonian(
            vec![Mode::Cavity1, Mode::Cavity2, Mode::Mechanics],
            &h,
            &s,
            full_langevin(&p, &l).baths,
        );
        assert_eq!(from_h.to_model(), build_full_model(&p, &l));
    }

    #[test]
    fn decoupled_blocks_and_diffusion() {
        let mut p = SystemParams::reference();
        p.coupling_j = 0.0;
        p.n_th = 2.0;
        let l = LinearizedParams {
            delta_1: 50.0,
            omega_m_tilde: 1.0,
            lambda: 0.0,
            coupling: 0.0,
        };
        let m = build_full_model(&p, &l);
        for r in 0..6 {
            for c in 0..6 {
                if r / 2 != c / 2 {
                    assert_eq!(m.drift[(r, c)], 0.0);
                }
            }
        }
        assert_eq!(m.drift[(0, 0)], -50.0);
        assert_eq!(m.drift[(0, 1)], -50.0);
        assert_eq!(m.drift[(1, 0)], 50.0);
        assert_eq!(m.drift[(1, 1)], -50.0);
        for (k, want) in [100.0, 100.0, 0.1, 0.1, 5e-6, 5e-6].into_iter().enumerate() {
            approx::assert_relative_eq!(m.diffusion[(k, k)], want, max_relative = 1e-14);
        }

        let eig = linalg::eigenvalues(&m.drift).unwrap();
        assert!(eig.iter().any(|e| (e - Complex64::new(-50.0, 50.0)).norm() < 1e-9));
        assert!(eig.iter().any(|e| (e - Complex64::new(-50.0, -50.0)).norm() < 1e-9));
    }
}
