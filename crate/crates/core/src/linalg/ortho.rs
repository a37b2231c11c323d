use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{dot, norm, ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Directions whose residual norm falls below this fraction of the largest
/// input norm are treated as linearly dependent and dropped.
const RANK_TOL: f64 = 1e-10;

/// Orthonormal basis for the span of `vectors`, in input order.
///
/// Modified Gram–Schmidt with one reorthogonalization pass; dependent
/// directions are dropped, so the column count is the numerical rank.
pub fn orthonormalize(vectors: &[Vec<C64>]) -> Result<ComplexMatrix> {
    let dim = match vectors.first() {
        Some(v) => v.len(),
        None => return Err(Error::EmptySpan),
    };
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::ShapeMismatch("vectors of unequal length".into()));
    }
    let scale = vectors.iter().map(|v| norm(v)).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::EmptySpan);
    }
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let n = norm(&w);
        if n <= RANK_TOL * scale {
            continue;
        }
        w.iter_mut().for_each(|x| *x /= n);
        basis.push(w);
    }
    if basis.is_empty() {
        return Err(Error::EmptySpan);
    }
    ComplexMatrix::from_columns(&basis)
}

/// [`orthonormalize`] applied to the columns of `m`.
pub fn orthonormalize_columns(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    orthonormalize(&m.columns())
}

/// Haar-distributed `n×k` isometry: Gram–Schmidt QR of a complex Gaussian
/// matrix. Gram–Schmidt leaves `R` with a positive real diagonal, which is
/// the phase normalization that makes `Q` Haar.
pub fn haar_isometry(n: usize, k: usize, seed: u64) -> Result<ComplexMatrix> {
    if k > n {
        return Err(Error::ShapeMismatch(format!("isometry {n}×{k} with k > n")));
    }
    if k == 0 {
        return Ok(ComplexMatrix::zeros(n, 0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    loop {
        let columns: Vec<Vec<C64>> = (0..k)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        C64::new(re * s, im * s)
                    })
                    .collect()
            })
            .collect();
        // a rank drop has probability zero; redraw if it ever happens
        match orthonormalize(&columns) {
            Ok(q) if q.cols() == k => return Ok(q),
            _ => continue,
        }
    }
}
