//! Closed-form rank-`k` ranges of Hermitian matrices.
//!
//! For Hermitian `A` with ascending spectrum `a_1 ≤ … ≤ a_N` (multiplicities
//! counted), `Λ_k(A) = [a_k, a_{N−k+1}]`: an interval, a point, or empty.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, numerical_rank, ComplexMatrix, HermitianEigenSystem, C64};
use crate::projection::{verify_compression, CompressionProjection};

/// Endpoints closer than this (relative to `max(1, ‖A‖_F)`) collapse to a
/// singleton.
pub const ENDPOINT_TOL: f64 = 1e-12;

/// Closed-endpoint membership tolerance, relative to `max(1, ‖A‖_F)`.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// Singular values of `T − λI` below this (relative) count as kernel.
pub const KERNEL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionStatus {
    /// The region is known to equal `Λ_k`.
    Exact,
    /// The region only contains `Λ_k`.
    OuterBound,
}

/// A computed or bounded description of `Λ_k(T)`.
#[derive(Debug, Clone, PartialEq)]
pub enum RankKRange {
    Empty,
    Singleton(C64),
    /// Real interval with `lo < hi`.
    Interval {
        lo: f64,
        hi: f64,
    },
    /// Convex polygon, counterclockwise.
    Region {
        polygon: Vec<C64>,
        status: RegionStatus,
    },
}

impl RankKRange {
    pub fn is_empty(&self) -> bool {
        matches!(self, RankKRange::Empty)
    }

    /// Real bounds `[lo, hi]` for empty-free real kinds.
    pub fn real_bounds(&self) -> Option<(f64, f64)> {
        match *self {
            RankKRange::Singleton(z) if z.im == 0.0 => Some((z.re, z.re)),
            RankKRange::Interval { lo, hi } => Some((lo, hi)),
            _ => None,
        }
    }

    /// Set inclusion for the real kinds. `Region` values are not compared.
    pub fn is_subset_of(&self, other: &RankKRange, tol: f64) -> bool {
        match (self.real_bounds(), other.real_bounds()) {
            _ if self.is_empty() => true,
            (Some((a, b)), Some((c, d))) => a >= c - tol && b <= d + tol,
            _ => false,
        }
    }
}

impl fmt::Display for RankKRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankKRange::Empty => write!(f, "Empty"),
            RankKRange::Singleton(z) if z.im == 0.0 => write!(f, "Singleton {}", z.re),
            RankKRange::Singleton(z) => write!(f, "Singleton {}{:+}i", z.re, z.im),
            RankKRange::Interval { lo, hi } => write!(f, "Interval {lo} {hi}"),
            RankKRange::Region { polygon, status } => {
                write!(f, "Region {status:?} {} vertices", polygon.len())
            }
        }
    }
}

fn check_rank(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::BadRank { k, n });
    }
    Ok(())
}

/// `Λ_k` read off an eigensystem.
pub fn range_from_eig(eig: &HermitianEigenSystem, k: usize) -> Result<RankKRange> {
    let n = eig.dim();
    check_rank(k, n)?;
    let lo = eig.values[k - 1];
    let hi = eig.values[n - k];
    let tol = ENDPOINT_TOL * eig.scale_ref();
    Ok(if (hi - lo).abs() <= tol {
        RankKRange::Singleton(C64::new(lo, 0.0))
    } else if lo < hi {
        RankKRange::Interval { lo, hi }
    } else {
        RankKRange::Empty
    })
}

/// `Λ_k(A) = [a_k, a_{N−k+1}]` for Hermitian `A`.
pub fn hermitian_range(a: &ComplexMatrix, k: usize) -> Result<RankKRange> {
    if a.is_square() {
        check_rank(k, a.rows())?;
    }
    range_from_eig(&hermitian_eig(a)?, k)
}

/// Closed-endpoint membership test on an eigensystem.
pub fn contains_in_eig(eig: &HermitianEigenSystem, k: usize, lambda: f64) -> Result<bool> {
    let tol = MEMBERSHIP_TOL * eig.scale_ref();
    Ok(match range_from_eig(eig, k)? {
        RankKRange::Empty => false,
        RankKRange::Singleton(z) => (lambda - z.re).abs() <= tol,
        RankKRange::Interval { lo, hi } => lambda >= lo - tol && lambda <= hi + tol,
        RankKRange::Region { .. } => unreachable!("Hermitian ranges are real"),
    })
}

/// Whether `λ ∈ Λ_k(A)`, closed endpoints at `1e−10·max(1, ‖A‖_F)`.
pub fn membership_hermitian(a: &ComplexMatrix, k: usize, lambda: f64) -> Result<bool> {
    if a.is_square() {
        check_rank(k, a.rows())?;
    }
    contains_in_eig(&hermitian_eig(a)?, k, lambda)
}

/// `Λ_1(A) ⊇ Λ_2(A) ⊇ … ⊇ Λ_N(A)`, one entry per `k`.
pub fn range_chain(a: &ComplexMatrix) -> Result<Vec<RankKRange>> {
    let eig = hermitian_eig(a)?;
    (1..=eig.dim()).map(|k| range_from_eig(&eig, k)).collect()
}

/// Outcome of [`large_k_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct LargeKReport {
    /// Numerical `dim ker(T − λI)`.
    pub kernel_dim: usize,
    /// `2k − N`.
    pub required: usize,
    /// For `k = N`: whether `T = λI` within tolerance.
    pub scalar_confirmed: Option<bool>,
    pub residual: f64,
}

/// For `2k > N`, a witness `(λ, P)` forces `dim ker(T − λI) ≥ 2k − N`, and
/// for `k = N` forces `T = λI`.
pub fn large_k_check(
    t: &ComplexMatrix,
    k: usize,
    lambda: C64,
    p: &CompressionProjection,
) -> Result<LargeKReport> {
    if !t.is_square() {
        return Err(Error::ShapeMismatch(
            "large-k check needs a square matrix".into(),
        ));
    }
    let n = t.rows();
    check_rank(k, n)?;
    if 2 * k <= n {
        return Err(Error::RankHypothesisViolated(format!(
            "2k = {} ≤ N = {n}",
            2 * k
        )));
    }
    if p.rank() != k {
        return Err(Error::ShapeMismatch(format!(
            "projection of rank {} for k = {k}",
            p.rank()
        )));
    }
    let tol = KERNEL_TOL * t.scale_ref();
    let residual = verify_compression(t, p, lambda)?;
    if residual > tol {
        return Err(Error::NotACompression { residual });
    }
    let shifted = t.shift_diagonal(-lambda);
    let kernel_dim = n - numerical_rank(&shifted, tol);
    let required = 2 * k - n;
    if kernel_dim < required {
        return Err(Error::MultiplicityTooSmall {
            found: kernel_dim,
            required,
        });
    }
    let scalar_confirmed = (k == n).then(|| shifted.frobenius_norm() <= tol);
    Ok(LargeKReport {
        kernel_dim,
        required,
        scalar_confirmed,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::pairing_projection;

    fn interval(lo: f64, hi: f64) -> RankKRange {
        RankKRange::Interval { lo, hi }
    }

    fn single(x: f64) -> RankKRange {
        RankKRange::Singleton(C64::new(x, 0.0))
    }

    #[test]
    fn six_level_diagonal() {
        let a = ComplexMatrix::real_diag(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(hermitian_range(&a, 2).unwrap(), interval(2.0, 5.0));
        assert_eq!(hermitian_range(&a, 3).unwrap(), interval(3.0, 4.0));
    }

    #[test]
    fn identity_is_singleton_for_all_k() {
        let a = ComplexMatrix::identity(4);
        for k in 1..=4 {
            assert_eq!(hermitian_range(&a, k).unwrap(), single(1.0));
        }
    }

    #[test]
    fn crossing_endpoints_are_empty() {
        let a = ComplexMatrix::real_diag(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(hermitian_range(&a, 3).unwrap(), RankKRange::Empty);
    }

    #[test]
    fn bad_rank_and_non_hermitian() {
        let a = ComplexMatrix::identity(3);
        assert_eq!(hermitian_range(&a, 0), Err(Error::BadRank { k: 0, n: 3 }));
        assert_eq!(hermitian_range(&a, 4), Err(Error::BadRank { k: 4, n: 3 }));
        let b = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[2.0, 0.0]]).unwrap();
        assert!(matches!(
            hermitian_range(&b, 1),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn membership_examples() {
        let a = ComplexMatrix::real_diag(&[0.0, 1.0, 2.0, 3.0]);
        assert!(membership_hermitian(&a, 2, 1.5).unwrap());
        assert!(!membership_hermitian(&a, 2, 3.0).unwrap());
        assert!(membership_hermitian(&a, 1, 0.0).unwrap());
        assert!(membership_hermitian(&a, 2, 2.0 + 1e-12).unwrap());
    }

    #[test]
    fn chain_examples() {
        let a = ComplexMatrix::real_diag(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(
            range_chain(&a).unwrap(),
            vec![
                interval(1.0, 4.0),
                interval(2.0, 3.0),
                RankKRange::Empty,
                RankKRange::Empty
            ]
        );
        assert_eq!(
            range_chain(&ComplexMatrix::identity(3)).unwrap(),
            vec![single(1.0); 3]
        );
        let b = ComplexMatrix::real_diag(&[0.0, 0.0, 5.0]);
        assert_eq!(
            range_chain(&b).unwrap(),
            vec![interval(0.0, 5.0), single(0.0), RankKRange::Empty]
        );
    }

    #[test]
    fn large_k_scalar_matrix() {
        let t = ComplexMatrix::identity(3).scale_real(2.0);
        let p = CompressionProjection::new(ComplexMatrix::identity(3), C64::new(2.0, 0.0)).unwrap();
        let report = large_k_check(&t, 3, C64::new(2.0, 0.0), &p).unwrap();
        assert_eq!(report.kernel_dim, 3);
        assert_eq!(report.required, 3);
        assert_eq!(report.scalar_confirmed, Some(true));
    }

    #[test]
    fn large_k_degenerate_hermitian() {
        for (diag, lambda, kernel) in [([1.0, 1.0, 2.0], 1.0, 2), ([1.0, 2.0, 3.0], 2.0, 1)] {
            let a = ComplexMatrix::real_diag(&diag);
            let eig = hermitian_eig(&a).unwrap();
            let p = pairing_projection(&eig, 2, lambda, &[], None).unwrap();
            let report = large_k_check(&a, 2, C64::new(lambda, 0.0), &p).unwrap();
            assert_eq!(report.kernel_dim, kernel);
            assert_eq!(report.required, 1);
            assert_eq!(report.scalar_confirmed, None);
        }
    }

    #[test]
    fn large_k_rejects_small_rank() {
        let a = ComplexMatrix::real_diag(&[0.0, 1.0, 2.0, 3.0]);
        let p = CompressionProjection::new(
            ComplexMatrix::identity(4).select_columns(&[0, 1]),
            C64::new(0.0, 0.0),
        )
        .unwrap();
        assert!(matches!(
            large_k_check(&a, 2, C64::new(0.5, 0.0), &p),
            Err(Error::RankHypothesisViolated(_))
        ));
    }
}
