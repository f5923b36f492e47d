use faer::Mat;
use num_complex::Complex64;
use serde::Serialize;

/// Truncation is adequate when no mode keeps more than this population in its
/// two highest Fock levels.
pub const BOUNDARY_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationReport {
    /// Population in the two highest levels of each mode.
    pub boundary_populations: Vec<f64>,
    pub adequate: bool,
    /// Dims to retry with: inadequate modes grown by half.
    pub suggested_dims: Vec<usize>,
}

impl TruncationReport {
    pub fn max_boundary_population(&self) -> f64 {
        self.boundary_populations.iter().copied().fold(0.0, f64::max)
    }
}

pub fn truncation_diagnostic(rho: &Mat<Complex64>, dims: &[usize]) -> TruncationReport {
    let total: usize = dims.iter().product();
    assert_eq!(rho.nrows(), total, "density matrix does not match the dims");
    let mut boundary = vec![0.0; dims.len()];
    for idx in 0..total {
        let p = rho[(idx, idx)].re;
        let mut rest = idx;
        for k in (0..dims.len()).rev() {
            let level = rest % dims[k];
            rest /= dims[k];
            if level + 2 >= dims[k] {
                boundary[k] += p;
            }
        }
    }
    let adequate = boundary.iter().all(|&p| p <= BOUNDARY_THRESHOLD);
    let suggested_dims = dims
        .iter()
        .zip(&boundary)
        .map(|(&d, &p)| if p > BOUNDARY_THRESHOLD { (3 * d).div_ceil(2) } else { d })
        .collect();
    TruncationReport {
        boundary_populations: boundary,
        adequate,
        suggested_dims,
    }
}
