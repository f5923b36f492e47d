use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;

/// Annihilation operators of each mode lifted to the full tensor-product space.
#[derive(Clone, Debug)]
pub struct FockOperatorSet {
    dims: Vec<usize>,
    total: usize,
    annihilators: Vec<CsrMatrix>,
    squares: Vec<CsrMatrix>,
    numbers: Vec<CsrMatrix>,
}

impl FockOperatorSet {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Config("at least one Fock mode is required".into()));
        }
        if let Some(&bad) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::domain("fock_dim", bad as f64, "each truncation must be >= 2"));
        }
        let total = dims.iter().product();
        let annihilators: Vec<CsrMatrix> = (0..dims.len())
            .map(|k| {
                dims.iter().enumerate().fold(CsrMatrix::identity(1), |acc, (m, &d)| {
                    let factor = if m == k {
                        CsrMatrix::annihilation(d)
                    } else {
                        CsrMatrix::identity(d)
                    };
                    acc.kron(&factor)
                })
            })
            .collect();
        let squares = annihilators.iter().map(|a| a.matmul(a)).collect();
        let numbers = annihilators.iter().map(|a| a.adjoint().matmul(a)).collect();
        Ok(FockOperatorSet {
            dims: dims.to_vec(),
            total,
            annihilators,
            squares,
            numbers,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Dimension of the tensor-product space.
    pub fn dim(&self) -> usize {
        self.total
    }

    pub fn n_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn a(&self, mode: usize) -> &CsrMatrix {
        &self.annihilators[mode]
    }

    pub fn a_dag(&self, mode: usize) -> CsrMatrix {
        self.annihilators[mode].adjoint()
    }

    pub fn a_squared(&self, mode: usize) -> &CsrMatrix {
        &self.squares[mode]
    }

    pub fn number(&self, mode: usize) -> &CsrMatrix {
        &self.numbers[mode]
    }

    /// `a + a†`.
    pub fn position(&self, mode: usize) -> CsrMatrix {
        self.a(mode).add(&self.a_dag(mode))
    }

    pub fn identity(&self) -> CsrMatrix {
        CsrMatrix::identity(self.total)
    }

    /// Fock level of `mode` in basis state `index`.
    pub fn level(&self, index: usize, mode: usize) -> usize {
        let stride: usize = self.dims[mode + 1..].iter().product();
        (index / stride) % self.dims[mode]
    }
}
