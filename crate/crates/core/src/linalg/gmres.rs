//! Restarted GMRES with right preconditioning, for complex systems that are
//! only available as matrix-vector products.

use num_complex::Complex64;

use super::norm2;

#[derive(Clone, Copy, Debug)]
pub struct GmresSettings {
    /// Relative residual target `||b - A x|| / ||b||`.
    pub tol: f64,
    /// Krylov dimension before restarting.
    pub restart: usize,
    /// Total Arnoldi steps across restarts.
    pub max_iter: usize,
}

#[derive(Clone, Debug)]
pub struct GmresOutcome {
    pub x: Vec<Complex64>,
    pub iterations: usize,
    /// True relative residual of the returned `x`.
    pub residual: f64,
    pub converged: bool,
}

/// Solves `A x = b` where `apply_a(v, out)` writes `A v` and
/// `apply_m(v, out)` writes `M v` for a preconditioner `M ≈ A⁻¹`. The Krylov
/// space is built for `A M`, and `x = M y`.
pub fn gmres(
    mut apply_a: impl FnMut(&[Complex64], &mut [Complex64]),
    mut apply_m: impl FnMut(&[Complex64], &mut [Complex64]),
    b: &[Complex64],
    settings: GmresSettings,
) -> GmresOutcome {
    let n = b.len();
    let zero = Complex64::new(0.0, 0.0);
    let b_norm = norm2(b);
    let mut x = vec![zero; n];
    if b_norm == 0.0 {
        return GmresOutcome {
            x,
            iterations: 0,
            residual: 0.0,
            converged: true,
        };
    }
    let m = settings.restart.max(1);
    let mut r = b.to_vec();
    let mut tmp = vec![zero; n];
    let mut w = vec![zero; n];
    let mut iterations = 0;

    loop {
        let beta = norm2(&r);
        let rel = beta / b_norm;
        if rel <= settings.tol || iterations >= settings.max_iter {
            return GmresOutcome {
                x,
                iterations,
                residual: rel,
                converged: rel <= settings.tol,
            };
        }

        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        // Columns of the Hessenberg matrix after rotation: h[j] has j + 2 entries.
        let mut h: Vec<Vec<Complex64>> = Vec::with_capacity(m);
        let mut cs: Vec<f64> = Vec::with_capacity(m);
        let mut sn: Vec<Complex64> = Vec::with_capacity(m);
        let mut g = vec![zero; m + 1];
        g[0] = Complex64::new(beta, 0.0);
        let mut k = 0;

        while k < m && iterations < settings.max_iter {
            apply_m(&basis[k], &mut tmp);
            apply_a(&tmp, &mut w);
            let mut col = vec![zero; k + 2];
            for (i, v) in basis.iter().enumerate() {
                let hij: Complex64 = v.iter().zip(&w).map(|(vi, wi)| vi.conj() * wi).sum();
                col[i] = hij;
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= hij * vi);
            }
            let h_next = norm2(&w);
            col[k + 1] = Complex64::new(h_next, 0.0);

            for i in 0..k {
                let (a, bb) = (col[i], col[i + 1]);
                col[i] = cs[i] * a + sn[i] * bb;
                col[i + 1] = -sn[i].conj() * a + cs[i] * bb;
            }
            let (c, s) = givens(col[k], col[k + 1]);
            col[k] = c * col[k] + s * col[k + 1];
            col[k + 1] = zero;
            g[k + 1] = -s.conj() * g[k];
            g[k] *= c;
            cs.push(c);
            sn.push(s);
            h.push(col);
            iterations += 1;
            k += 1;

            let converged = g[k].norm() / b_norm <= settings.tol;
            if converged || h_next == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / h_next).collect());
        }

        // Back substitution for the upper-triangular k x k system.
        let mut y = vec![zero; k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for j in i + 1..k {
                acc -= h[j][i] * y[j];
            }
            y[i] = acc / h[i][i];
        }
        let mut u = vec![zero; n];
        for (yj, v) in y.iter().zip(&basis) {
            u.iter_mut().zip(v).for_each(|(ui, vi)| *ui += yj * vi);
        }
        apply_m(&u, &mut tmp);
        x.iter_mut().zip(&tmp).for_each(|(xi, ti)| *xi += ti);

        apply_a(&x, &mut w);
        r.iter_mut()
            .zip(b.iter().zip(&w))
            .for_each(|(ri, (bi, wi))| *ri = bi - wi);
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` with real `c` that zeroes `b` in `(a, b)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    if b.norm() == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if a.norm() == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let t = a.norm().hypot(b.norm());
    let c = a.norm() / t;
    let s = (a / a.norm()) * b.conj() / t;
    (c, s)
}
