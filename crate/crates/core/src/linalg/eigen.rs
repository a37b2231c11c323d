//! Cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies the classical real Jacobi rotation, so the
//! composite `G = diag(1, e^{-iφ}) · R(c, s)` annihilates `a_pq` exactly.

use super::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Sweep limit for [`hermitian_eig`].
pub const MAX_JACOBI_SWEEPS: usize = 100;

/// Input Hermitian check, relative to `max(1, ‖A‖_F)`.
const HERMITIAN_TOL: f64 = 1e-12;

/// Stop when the off-diagonal Frobenius mass is below this fraction of `‖A‖_F`.
const OFF_DIAGONAL_TOL: f64 = 1e-13;

/// Ascending eigenvalues `a_1 ≤ … ≤ a_N` with orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigenSystem {
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector for `values[i]`.
    pub vectors: ComplexMatrix,
    /// `‖A‖_F` of the decomposed matrix.
    pub source_norm: f64,
}

impl HermitianEigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.vectors.column(i)
    }

    /// `max(1, ‖A‖_F)`.
    pub fn scale_ref(&self) -> f64 {
        self.source_norm.max(1.0)
    }

    /// `Σ_i f(a_i) |ψ_i⟩⟨ψ_i|`.
    pub fn spectral_function(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let weights: Vec<f64> = self.values.iter().map(|&a| f(a)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for (l, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, l)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, l)].conj();
                }
            }
        }
        out
    }

    /// `Σ_i a_i |ψ_i⟩⟨ψ_i|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.spectral_function(|a| a)
    }

    /// Eigenvector columns for the given indices.
    pub fn select(&self, indices: &[usize]) -> ComplexMatrix {
        self.vectors.select_columns(indices)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.
///
/// Deterministic: the sweep order is fixed (row-major over the strict upper
/// triangle) and ties in the final sort keep Jacobi output order.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEigenSystem> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "eigendecomposition of a {}×{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let deviation = a.hermitian_deviation();
    let norm = a.frobenius_norm();
    if !(deviation <= HERMITIAN_TOL * norm.max(1.0)) {
        return Err(Error::NotHermitian { deviation });
    }
    let n = a.rows();
    // work on the exactly Hermitian average
    let mut m = a.hermitian_part();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    let target = OFF_DIAGONAL_TOL * norm;

    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        if off_diagonal_norm(&m) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&m) > target {
        return Err(Error::NoConvergence {
            sweeps: MAX_JACOBI_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    Ok(HermitianEigenSystem {
        values: order.iter().map(|&i| m[(i, i)].re).collect(),
        vectors: v.select_columns(&order),
        source_norm: norm,
    })
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let gamma = m[(p, q)];
    let g = gamma.norm();
    if g == 0.0 {
        return;
    }
    let alpha = m[(p, p)].re;
    let beta = m[(q, q)].re;
    let phase = gamma / g;
    let theta = (beta - alpha) / (2.0 * g);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G = [[c, s], [-s·e^{-iφ}, c·e^{-iφ}]] acting on coordinates (p, q)
    let gpp = C64::new(c, 0.0);
    let gpq = C64::new(s, 0.0);
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;

    let n = m.rows();
    for r in 0..n {
        let (xp, xq) = (m[(r, p)], m[(r, q)]);
        m[(r, p)] = xp * gpp + xq * gqp;
        m[(r, q)] = xp * gpq + xq * gqq;
        let (yp, yq) = (v[(r, p)], v[(r, q)]);
        v[(r, p)] = yp * gpp + yq * gqp;
        v[(r, q)] = yp * gpq + yq * gqq;
    }
    for col in 0..n {
        let (xp, xq) = (m[(p, col)], m[(q, col)]);
        m[(p, col)] = gpp.conj() * xp + gqp.conj() * xq;
        m[(q, col)] = gpq.conj() * xp + gqq.conj() * xq;
    }
    m[(p, p)] = C64::new(alpha - t * g, 0.0);
    m[(q, q)] = C64::new(beta + t * g, 0.0);
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
}
