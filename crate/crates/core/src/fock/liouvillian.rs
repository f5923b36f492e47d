use faer::Mat;
use num_complex::Complex64;

use super::FockOperatorSet;
use crate::error::{Error, Result};
use crate::gaussian::LinearizedParams;
use crate::linalg::sparse::kron_into;
use crate::linalg::CsrMatrix;
use crate::params::SystemParams;
use crate::reduction::EffectiveParams;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Dissipator `rate * (c ρ c† - {c†c, ρ}/2)`.
#[derive(Clone, Debug)]
pub struct Jump {
    pub rate: f64,
    pub op: CsrMatrix,
}

/// Lindblad generator on column-stacked density matrices, together with the
/// Hamiltonian and jump operators it was assembled from.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    pub superop: CsrMatrix,
    pub hamiltonian: CsrMatrix,
    pub jumps: Vec<Jump>,
    pub ops: FockOperatorSet,
}

impl Liouvillian {
    /// Assembles `-i[H, .] + sum_k D[c_k]` by Kronecker lifting. Jumps with zero
    /// rate are dropped. Fails before allocating when the nonzero estimate
    /// exceeds `budget`.
    pub fn new(ops: FockOperatorSet, hamiltonian: CsrMatrix, jumps: Vec<Jump>, budget: usize) -> Result<Self> {
        let d = ops.dim();
        assert_eq!((hamiltonian.nrows(), hamiltonian.ncols()), (d, d));
        let jumps: Vec<Jump> = jumps.into_iter().filter(|j| j.rate != 0.0).collect();
        let decays: Vec<CsrMatrix> = jumps.iter().map(|j| j.op.adjoint().matmul(&j.op)).collect();

        let mut estimated_nnz = 2 * d * hamiltonian.nnz();
        for (jump, cdc) in jumps.iter().zip(&decays) {
            estimated_nnz += jump.op.nnz() * jump.op.nnz() + 2 * d * cdc.nnz();
        }
        if estimated_nnz > budget {
            return Err(Error::Capacity {
                estimated_nnz,
                budget,
            });
        }

        let id = CsrMatrix::identity(d);
        let mut triplets = Vec::with_capacity(estimated_nnz);
        kron_into(&mut triplets, &id, &hamiltonian, -I);
        kron_into(&mut triplets, &hamiltonian.transpose(), &id, I);
        for (jump, cdc) in jumps.iter().zip(&decays) {
            let r = Complex64::new(jump.rate, 0.0);
            kron_into(&mut triplets, &jump.op.conj(), &jump.op, r);
            kron_into(&mut triplets, &id, cdc, -0.5 * r);
            kron_into(&mut triplets, &cdc.transpose(), &id, -0.5 * r);
        }
        let superop = CsrMatrix::from_triplets(d * d, d * d, triplets);
        Ok(Liouvillian {
            superop,
            hamiltonian,
            jumps,
            ops,
        })
    }

    /// Hilbert-space dimension `d`; the superoperator is `d² x d²`.
    pub fn dim(&self) -> usize {
        self.ops.dim()
    }

    pub fn dims(&self) -> &[usize] {
        self.ops.dims()
    }

    /// The mechanical mode is the last tensor factor.
    pub fn mechanical_mode(&self) -> usize {
        self.ops.n_modes() - 1
    }

    pub fn apply(&self, rho: &[Complex64], out: &mut [Complex64]) {
        self.superop.matvec(rho, out);
    }

    pub fn apply_matrix(&self, rho: &Mat<Complex64>) -> Mat<Complex64> {
        let d = self.dim();
        let v = super::vectorize(rho);
        let mut out = vec![Complex64::new(0.0, 0.0); d * d];
        self.apply(&v, &mut out);
        super::unvectorize(&out, d)
    }

    /// Non-Hermitian effective generator `K = -iH - sum_k r_k c_k†c_k / 2`,
    /// so that the no-jump part of the dynamics is `K ρ + ρ K†`.
    pub fn effective_generator(&self) -> Mat<Complex64> {
        let mut k = self.hamiltonian.to_dense();
        for v in k.col_iter_mut().flat_map(|c| c.iter_mut()) {
            *v *= -I;
        }
        for jump in &self.jumps {
            let cdc = jump.op.adjoint().matmul(&jump.op);
            for (i, j, v) in cdc.triplets() {
                k[(i, j)] -= 0.5 * jump.rate * v;
            }
        }
        k
    }
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Two-mode `(a2, b)` generator:
/// `H = -Delta_eff a†a + omega~' b†b - G_eff (a + a†)(b + b†) + Lambda' (b² + b†²)`
/// with decay `kappa_eff` on cavity 2 and a thermal mechanical bath.
pub fn build_liouvillian_effective(
    eff: &EffectiveParams,
    params: &SystemParams,
    dims: &[usize],
    budget: usize,
) -> Result<Liouvillian> {
    if dims.len() != 2 {
        return Err(Error::Config(format!("effective model needs 2 Fock dims, got {}", dims.len())));
    }
    let ops = FockOperatorSet::new(dims)?;
    let (a, b) = (ops.a(0), ops.a(1));
    let (x_a, x_b) = (ops.position(0), ops.position(1));
    let b2 = ops.a_squared(1);
    let h = ops
        .number(0)
        .scale(real(-eff.delta_eff))
        .add(&ops.number(1).scale(real(eff.omega_m_tilde_prime)))
        .add(&x_a.matmul(&x_b).scale(real(-eff.g_eff)))
        .add(&b2.add(&b2.adjoint()).scale(real(eff.lambda_prime)));
    let jumps = vec![
        Jump {
            rate: eff.kappa_eff,
            op: a.clone(),
        },
        Jump {
            rate: params.gamma_m * (params.n_th + 1.0),
            op: b.clone(),
        },
        Jump {
            rate: params.gamma_m * params.n_th,
            op: b.adjoint(),
        },
    ];
    Liouvillian::new(ops, h, jumps, budget)
}

/// Three-mode `(a1, a2, b)` generator of the linearized fluctuations:
/// `H = -Delta_1 a1†a1 - delta_2 a2†a2 + omega~ b†b + Lambda (b² + b†²)
///      + J (a1†a2 + a1 a2†) - G (a1 + a1†)(b + b†)`.
pub fn build_liouvillian_full(
    lin: &LinearizedParams,
    params: &SystemParams,
    dims: &[usize],
    budget: usize,
) -> Result<Liouvillian> {
    if dims.len() != 3 {
        return Err(Error::Config(format!("full model needs 3 Fock dims, got {}", dims.len())));
    }
    let ops = FockOperatorSet::new(dims)?;
    let (a1, a2, b) = (ops.a(0), ops.a(1), ops.a(2));
    let b2 = ops.a_squared(2);
    let hop = ops.a_dag(0).matmul(a2);
    let h = ops
        .number(0)
        .scale(real(-lin.delta_1))
        .add(&ops.number(1).scale(real(-params.delta_2)))
        .add(&ops.number(2).scale(real(lin.omega_m_tilde)))
        .add(&b2.add(&b2.adjoint()).scale(real(lin.lambda)))
        .add(&hop.add(&hop.adjoint()).scale(real(params.coupling_j)))
        .add(&ops.position(0).matmul(&ops.position(2)).scale(real(-lin.coupling)));
    let jumps = vec![
        Jump {
            rate: params.kappa_1,
            op: a1.clone(),
        },
        Jump {
            rate: params.kappa_2,
            op: a2.clone(),
        },
        Jump {
            rate: params.gamma_m * (params.n_th + 1.0),
            op: b.clone(),
        },
        Jump {
            rate: params.gamma_m * params.n_th,
            op: b.adjoint(),
        },
    ];
    Liouvillian::new(ops, h, jumps, budget)
}
