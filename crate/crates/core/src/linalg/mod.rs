//! Small dense helpers on top of faer, an in-house CSR matrix and a restarted
//! GMRES solver.

pub mod gmres;
pub mod sparse;

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use gmres::{gmres, GmresOutcome, GmresSettings};
pub use sparse::CsrMatrix;

/// Routes every faer kernel through the calling thread. Parallelism in this
/// crate comes from independent sweep points instead, which keeps each solve
/// deterministic.
pub fn use_sequential_dense() {
    faer::set_global_parallelism(Par::Seq);
}

/// Eigenvalues of a real square matrix.
pub fn eigenvalues(a: &Mat<f64>) -> Result<Vec<Complex64>> {
    a.eigenvalues()
        .map_err(|e| Error::Numerics(format!("eigenvalue decomposition failed: {e:?}")))
}

/// Dense complex product `a * b`, single-threaded.
pub fn mat_mul(a: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) -> Mat<Complex64> {
    let mut out = Mat::zeros(a.nrows(), b.ncols());
    matmul(
        out.as_mut(),
        Accum::Replace,
        a,
        b,
        Complex64::new(1.0, 0.0),
        Par::Seq,
    );
    out
}

/// Frobenius norm of a real matrix.
pub fn frobenius(a: &Mat<f64>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a[(i, j)] * a[(i, j)];
        }
    }
    s.sqrt()
}

/// Euclidean norm of a complex vector.
pub fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
