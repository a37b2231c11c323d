//! Witness for arbitrary square `T` when `N ≥ 4k − 3`.
//!
//! Compress `Im T` to a scalar `b` on a rank-`(2k−1)` subspace, then compress
//! the `(2k−1)×(2k−1)` matrix `F*(Re T)F` to the scalar `a` at its middle
//! eigenvalue. The composite frame witnesses `a + ib ∈ Λ_k(T)`.

use super::{pairing_projection, CompressionProjection};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, C64};

/// Returns `(λ, P)` with `P` of rank `k` and `PTP = λP`.
pub fn general_matrix_projection(
    t: &ComplexMatrix,
    k: usize,
) -> Result<(C64, CompressionProjection)> {
    if !t.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "{}×{} matrix",
            t.rows(),
            t.cols()
        )));
    }
    let n = t.rows();
    if k == 0 || k > n {
        return Err(Error::BadRank { k, n });
    }
    if 4 * k - 3 > n {
        return Err(Error::RankHypothesisViolated(format!(
            "4k − 3 = {} exceeds N = {n}",
            4 * k - 3
        )));
    }
    let m = 2 * k - 1;
    let b_eig = hermitian_eig(&t.imaginary_part())?;
    let b = b_eig.values[m - 1];
    let outer = pairing_projection(&b_eig, m, b, &[], None)?;
    let f = outer.frame();

    let a0 = f.adjoint_mul(&(&t.hermitian_part() * f))?;
    let a_eig = hermitian_eig(&a0.hermitian_part())?;
    let a = a_eig.values[k - 1];
    let inner = pairing_projection(&a_eig, k, a, &[], None)?;

    let lambda = C64::new(a, b);
    let frame = f * inner.frame();
    let p = CompressionProjection::new(frame, lambda)?.verified(t)?;
    Ok((lambda, p))
}
