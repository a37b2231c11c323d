//! One-sided (Hestenes) Jacobi SVD.
//!
//! Small singular values come out with absolute accuracy near
//! `ε·‖M‖`, which the squared-Gram route cannot deliver. Kernel dimensions
//! and principal angles both depend on that.

use super::{ComplexMatrix, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;
const ORTHOGONALITY_TOL: f64 = 1e-15;

struct Decomposition {
    /// Descending.
    values: Vec<f64>,
    /// Right singular vectors, columns aligned with `values`.
    right: ComplexMatrix,
}

fn decompose(m: &ComplexMatrix) -> Decomposition {
    let (rows, cols) = m.shape();
    let mut u = m.clone();
    let mut v = ComplexMatrix::identity(cols);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C64::new(0.0, 0.0);
                for r in 0..rows {
                    let (a, b) = (u[(r, p)], u[(r, q)]);
                    alpha += a.norm_sqr();
                    beta += b.norm_sqr();
                    gamma += a.conj() * b;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= ORTHOGONALITY_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let theta = (beta - alpha) / (2.0 * g);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let gqp = -phase.conj() * s;
                let gqq = phase.conj() * c;
                for r in 0..rows {
                    let (xp, xq) = (u[(r, p)], u[(r, q)]);
                    u[(r, p)] = xp * c + xq * gqp;
                    u[(r, q)] = xp * s + xq * gqq;
                }
                for r in 0..cols {
                    let (xp, xq) = (v[(r, p)], v[(r, q)]);
                    v[(r, p)] = xp * c + xq * gqp;
                    v[(r, q)] = xp * s + xq * gqq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..cols)
        .map(|j| (0..rows).map(|r| u[(r, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    Decomposition {
        values: order.iter().map(|&j| norms[j]).collect(),
        right: v.select_columns(&order),
    }
}

/// Singular values in descending order (one per column).
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    decompose(m).values
}

/// Number of singular values strictly above `tol` (absolute).
pub fn numerical_rank(m: &ComplexMatrix, tol: f64) -> usize {
    let rank_bound = m.rows().min(m.cols());
    decompose(m)
        .values
        .iter()
        .take(rank_bound)
        .filter(|&&s| s > tol)
        .count()
}

/// Orthonormal basis (columns) of the numerical null space: right singular
/// vectors whose singular value is at most `tol`.
pub fn null_space(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let d = decompose(m);
    let rank_bound = m.rows().min(m.cols());
    let keep: Vec<usize> = (0..d.values.len())
        .filter(|&j| j >= rank_bound || d.values[j] <= tol)
        .collect();
    d.right.select_columns(&keep)
}

/// Principal angles (ascending, radians) between the column spaces of two
/// isometries with the same number of columns.
///
/// Computed from the sines, i.e. the singular values of `(I − AA*)B`, which
/// keeps angles far below `√ε` resolvable.
pub fn principal_angles(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Vec<f64>> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::ShapeMismatch(format!(
            "principal angles between {}×{} and {}×{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    for m in [a, b] {
        let deviation = m.isometry_deviation();
        if !(deviation <= 1e-8) {
            return Err(Error::NotIsometry { deviation });
        }
    }
    let projected = a * &a.adjoint_mul(b)?;
    let residual = b - &projected;
    let mut angles: Vec<f64> = singular_values(&residual)
        .into_iter()
        .map(|s| s.min(1.0).asin())
        .collect();
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_isometry;

    #[test]
    fn diagonal_singular_values() {
        let m = ComplexMatrix::diag(&[C64::new(0.0, -3.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let s = singular_values(&m);
        assert!((s[0] - 3.0).abs() < 1e-15 && (s[1] - 1.0).abs() < 1e-15 && s[2] == 0.0);
        assert_eq!(numerical_rank(&m, 1e-12), 2);
    }

    #[test]
    fn rank_deficient_product_resolves_tiny_values() {
        // rank 2 in C^5: small singular values stay at rounding level
        let a = haar_isometry(5, 2, 1).unwrap();
        let b = haar_isometry(5, 2, 2).unwrap();
        let m = &a * &b.adjoint();
        let s = singular_values(&m);
        assert!((s[0] - 1.0).abs() < 1e-13 && (s[1] - 1.0).abs() < 1e-13);
        assert!(s[2..].iter().all(|&x| x < 1e-14), "{s:?}");
        let kernel = null_space(&m, 1e-10);
        assert_eq!(kernel.cols(), 3);
        assert!((&m * &kernel).frobenius_norm() < 1e-13);
    }

    #[test]
    fn principal_angles_detect_identity_and_rotation() {
        let a = haar_isometry(6, 3, 5).unwrap();
        let angles = principal_angles(&a, &a).unwrap();
        assert!(angles.iter().all(|&t| t < 1e-14));

        let e1 = ComplexMatrix::identity(2).select_columns(&[0]);
        let theta: f64 = 0.3;
        let rotated = ComplexMatrix::from_real_rows(&[&[theta.cos()], &[theta.sin()]]).unwrap();
        let angles = principal_angles(&e1, &rotated).unwrap();
        assert!((angles[0] - theta).abs() < 1e-15);
    }

    #[test]
    fn tiny_angles_are_resolved() {
        let theta = 1e-9_f64;
        let e1 = ComplexMatrix::identity(2).select_columns(&[0]);
        let rotated = ComplexMatrix::from_real_rows(&[&[theta.cos()], &[theta.sin()]]).unwrap();
        let angles = principal_angles(&e1, &rotated).unwrap();
        assert!((angles[0] - theta).abs() < 1e-20);
    }
}
