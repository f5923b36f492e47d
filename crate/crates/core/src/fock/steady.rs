use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use num_complex::Complex64;

use super::{unvectorize, Liouvillian};
use crate::error::{Error, Result};
use crate::linalg::{gmres, mat_mul, norm2, GmresSettings};

/// Largest accepted `||L vec(ρ)||_2` for a returned steady state.
const STEADY_RESIDUAL_TOL: f64 = 1e-9;
const PROBE_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct SteadyStateOutcome {
    pub rho: Mat<Complex64>,
    /// `||L vec(ρ)||_2` after Hermitization and trace normalization.
    pub residual: f64,
    pub iterations: usize,
}

/// Exact inverse of the no-jump part `X -> K X + X K†` through the
/// eigendecomposition `K = W diag(λ) W⁻¹`.
struct NoJumpInverse {
    w: Mat<Complex64>,
    w_adj: Mat<Complex64>,
    w_inv: Mat<Complex64>,
    w_inv_adj: Mat<Complex64>,
    inv_den: Mat<Complex64>,
}

impl NoJumpInverse {
    fn new(l: &Liouvillian) -> Option<Self> {
        let k = l.effective_generator();
        let d = k.nrows();
        let evd = k.eigen().ok()?;
        let w = evd.U().to_owned();
        let lambda: Vec<Complex64> = (0..d).map(|i| evd.S()[i]).collect();
        let w_inv = w.partial_piv_lu().solve(Mat::<Complex64>::identity(d, d));
        if !(0..d).all(|j| (0..d).all(|i| w_inv[(i, j)].is_finite())) {
            return None;
        }
        let scale = lambda.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        let floor = 1e-12 * scale;
        let inv_den = Mat::from_fn(d, d, |i, j| {
            let den = lambda[i] + lambda[j].conj();
            if den.norm() < floor {
                Complex64::new(-1.0 / floor, 0.0)
            } else {
                1.0 / den
            }
        });
        Some(NoJumpInverse {
            w_adj: w.adjoint().to_owned(),
            w_inv_adj: w_inv.adjoint().to_owned(),
            w,
            w_inv,
            inv_den,
        })
    }

    fn apply(&self, y: &[Complex64], out: &mut [Complex64]) {
        let d = self.w.nrows();
        let y = unvectorize(y, d);
        let t = mat_mul(mat_mul(self.w_inv.as_ref(), y.as_ref()).as_ref(), self.w_inv_adj.as_ref());
        let t = Mat::from_fn(d, d, |i, j| t[(i, j)] * self.inv_den[(i, j)]);
        let x = mat_mul(mat_mul(self.w.as_ref(), t.as_ref()).as_ref(), self.w_adj.as_ref());
        for j in 0..d {
            for i in 0..d {
                out[i + d * j] = x[(i, j)];
            }
        }
    }
}

/// Unique trace-one solution of `L ρ = 0`.
///
/// The trace condition is built into the operator: `L'(x) = L x + tr(x) u`
/// with `u = I/d` is nonsingular exactly when the steady state is unique, and
/// `L'(ρ) = u` forces both `L ρ = 0` and `tr ρ = 1`. The system is solved by
/// restarted GMRES, right-preconditioned with the exact inverse of the
/// no-jump generator.
pub fn steady_state(l: &Liouvillian, settings: GmresSettings) -> Result<SteadyStateOutcome> {
    let d = l.dim();
    let n = d * d;
    let u_diag = Complex64::new(1.0 / d as f64, 0.0);
    let mut b = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..d {
        b[i + d * i] = u_diag;
    }
    let augmented = |x: &[Complex64], out: &mut [Complex64]| {
        l.apply(x, out);
        let tr: Complex64 = (0..d).map(|i| x[i + d * i]).sum();
        for i in 0..d {
            out[i + d * i] += tr * u_diag;
        }
    };
    let precond = NoJumpInverse::new(l);
    let outcome = match &precond {
        Some(p) => gmres(augmented, |v, o| p.apply(v, o), &b, settings),
        None => {
            log::warn!("no-jump generator is not diagonalizable; running GMRES unpreconditioned");
            gmres(augmented, |v, o| o.copy_from_slice(v), &b, settings)
        }
    };
    if !outcome.converged {
        return Err(Error::DegenerateSteadyState(format!(
            "GMRES stopped after {} iterations at relative residual {:e}",
            outcome.iterations, outcome.residual
        )));
    }

    probe_uniqueness(l, precond.as_ref(), &augmented_probe(l), settings)?;

    let x = unvectorize(&outcome.x, d);
    let mut rho = Mat::from_fn(d, d, |i, j| 0.5 * (x[(i, j)] + x[(j, i)].conj()));
    let trace: f64 = (0..d).map(|i| rho[(i, i)].re).sum();
    if !(trace.abs() > 0.0) {
        return Err(Error::DegenerateSteadyState("steady state has zero trace".into()));
    }
    for j in 0..d {
        for i in 0..d {
            rho[(i, j)] /= trace;
        }
    }
    let mut lr = vec![Complex64::new(0.0, 0.0); n];
    l.apply(&super::vectorize(&rho), &mut lr);
    let residual = norm2(&lr);
    if !(residual < STEADY_RESIDUAL_TOL) {
        return Err(Error::DegenerateSteadyState(format!(
            "residual ||L rho|| = {residual:e} exceeds {STEADY_RESIDUAL_TOL:e}"
        )));
    }
    Ok(SteadyStateOutcome {
        rho,
        residual,
        iterations: outcome.iterations,
    })
}

/// A trace-one Hermitian right-hand side with generic off-diagonal structure.
fn augmented_probe(l: &Liouvillian) -> Vec<Complex64> {
    let d = l.dim();
    let mut v = vec![Complex64::new(0.0, 0.0); d * d];
    let pattern = |i: usize, j: usize| ((i * 7919 + j * 104_729) % 97) as f64 / 97.0 - 0.5;
    for j in 0..d {
        for i in 0..d {
            let (lo, hi) = (i.min(j), i.max(j));
            let re = 0.1 * pattern(lo, hi) / d as f64;
            let im = if i == j { 0.0 } else { 0.1 * pattern(hi, lo) / d as f64 };
            v[i + d * j] = Complex64::new(re, if i < j { im } else { -im });
        }
    }
    let tr: f64 = (0..d).map(|i| v[i + d * i].re).sum();
    for i in 0..d {
        v[i + d * i] += Complex64::new((1.0 - tr) / d as f64, 0.0);
    }
    v
}

/// `L' x = v` is solvable for every trace-one `v` exactly when `L` has a
/// one-dimensional kernel. A second solve with a generic right-hand side
/// exposes extra steady states, which a single solve with `I/d` can miss.
fn probe_uniqueness(
    l: &Liouvillian,
    precond: Option<&NoJumpInverse>,
    v: &[Complex64],
    settings: GmresSettings,
) -> Result<()> {
    let d = l.dim();
    let augmented = |x: &[Complex64], out: &mut [Complex64]| {
        l.apply(x, out);
        let tr: Complex64 = (0..d).map(|i| x[i + d * i]).sum();
        for i in 0..d {
            out[i + d * i] += tr / d as f64;
        }
    };
    let probe_settings = GmresSettings {
        tol: settings.tol.max(PROBE_TOL),
        ..settings
    };
    let out = match precond {
        Some(p) => gmres(augmented, |x, o| p.apply(x, o), v, probe_settings),
        None => gmres(augmented, |x, o| o.copy_from_slice(x), v, probe_settings),
    };
    if out.converged {
        Ok(())
    } else {
        Err(Error::DegenerateSteadyState(format!(
            "generator kernel has more than one dimension (probe residual {:e})",
            out.residual
        )))
    }
}

/// Smallest eigenvalue of a Hermitian density matrix.
pub fn min_eigenvalue(rho: &Mat<Complex64>) -> Result<f64> {
    let eig = rho
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerics(format!("Hermitian eigenvalues failed: {e:?}")))?;
    Ok(eig.into_iter().fold(f64::INFINITY, f64::min))
}
