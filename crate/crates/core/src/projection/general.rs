//! Complete construction of compression projections for Hermitian `A`.
//!
//! Shift so that `λ = 0` and split `C^N` into the positive, zero and negative
//! eigenspaces of `A` (projections `P_+`, `P_0`, `P_−`). With
//! `f(x) = |x|^{−1/2}` for `x ≠ 0` and `f(0) = 1`, `f(A)Af(A) = P_+ − P_−`,
//! so `W = f(A)V` is compressed to zero exactly when `‖P_+v‖ = ‖P_−v‖` on
//! `V`. Every such `V` has the form
//!
//! ```text
//! V = V_0 + { v + Xv + Uv : v ∈ V_+ }
//! ```
//!
//! with `V_0 ⊆ ker A` (`dim k_1`), `V_+ ⊆ P_+C^N` (`dim k_2`), an isometry
//! `U: V_+ → P_−C^N` and any `X: V_+ → ker A ∩ V_0^⊥`. Going the other way,
//! `V = f(A)^{−1} ran P` recovers the parameters of any witness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{verify_compression, CompressionProjection};
use crate::error::{Error, Result};
use crate::linalg::{
    haar_isometry, hermitian_eig, orthonormalize_columns, singular_values, ComplexMatrix,
    HermitianEigenSystem, C64,
};
use crate::range::{contains_in_eig, membership_hermitian};

/// Eigenvalues of `A − λI` within this fraction of `max(1, ‖A‖_F)` of zero
/// belong to the kernel cluster.
pub const CLUSTER_TOL: f64 = 1e-9;

const PARAM_TOL: f64 = 1e-8;
const RECOVERY_RESIDUAL_TOL: f64 = 1e-8;
/// `‖P_+v‖` below this marks a direction of `V` as lying in the kernel.
const RECOVERY_RANK_TOL: f64 = 1e-6;

/// Eigenvector blocks of a shifted eigensystem.
#[derive(Debug, Clone)]
pub struct SpectralSplit {
    pub negative: ComplexMatrix,
    pub kernel: ComplexMatrix,
    pub positive: ComplexMatrix,
}

impl SpectralSplit {
    pub fn new(shifted: &HermitianEigenSystem) -> Self {
        let tol = CLUSTER_TOL * shifted.scale_ref();
        let idx = |pred: &dyn Fn(f64) -> bool| -> Vec<usize> {
            (0..shifted.dim())
                .filter(|&i| pred(shifted.values[i]))
                .collect()
        };
        Self {
            negative: shifted.select(&idx(&|a| a < -tol)),
            kernel: shifted.select(&idx(&|a| a.abs() <= tol)),
            positive: shifted.select(&idx(&|a| a > tol)),
        }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (
            self.negative.cols(),
            self.kernel.cols(),
            self.positive.cols(),
        )
    }

    fn project(block: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
        block * &block.adjoint_mul(m).expect("conformable")
    }

    pub fn project_positive(&self, m: &ComplexMatrix) -> ComplexMatrix {
        Self::project(&self.positive, m)
    }

    pub fn project_kernel(&self, m: &ComplexMatrix) -> ComplexMatrix {
        Self::project(&self.kernel, m)
    }

    pub fn project_negative(&self, m: &ComplexMatrix) -> ComplexMatrix {
        Self::project(&self.negative, m)
    }
}

/// Eigensystem of `A − λI` whose cluster threshold refers to `‖A‖_F`.
pub fn shifted_eig(a: &ComplexMatrix, lambda: f64) -> Result<HermitianEigenSystem> {
    let mut eig = hermitian_eig(&a.shift_diagonal(C64::new(-lambda, 0.0)))?;
    eig.source_norm = a.frobenius_norm();
    Ok(eig)
}

/// `(V_0, V_+, U, X)`, each stored as `N×·` matrices in ambient
/// coordinates: column `j` of `u` is `U(v_+^j)` and of `x` is `X(v_+^j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralParams {
    /// `(k1, k2)`.
    pub split: (usize, usize),
    pub v0: ComplexMatrix,
    pub vplus: ComplexMatrix,
    pub u: ComplexMatrix,
    pub x: ComplexMatrix,
}

fn mix_seed(seed: u64, stream: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xBF58_476D_1CE4_E5B9))
}

/// Splits `(k1, k2)` with `k1 ≤ dim ker`, `k2 ≤ min(dim P_+, dim P_−)`.
pub fn feasible_splits(shifted: &HermitianEigenSystem, k: usize) -> Vec<(usize, usize)> {
    let (dn, d0, dp) = SpectralSplit::new(shifted).dims();
    (0..=k.min(d0))
        .map(|k1| (k1, k - k1))
        .filter(|&(_, k2)| k2 <= dn.min(dp))
        .collect()
}

impl GeneralParams {
    pub fn rank(&self) -> usize {
        self.split.0 + self.split.1
    }

    /// Random parameters for a given split: Haar `V_0`, `V_+` and `U` inside
    /// their eigenspaces, `X = 0`.
    pub fn sample(
        shifted: &HermitianEigenSystem,
        split: (usize, usize),
        seed: u64,
    ) -> Result<Self> {
        let blocks = SpectralSplit::new(shifted);
        let (k1, k2) = split;
        check_split(&blocks, k1, k2)?;
        let (dn, d0, dp) = blocks.dims();
        Ok(Self {
            split,
            v0: &blocks.kernel * &haar_isometry(d0, k1, mix_seed(seed, 0))?,
            vplus: &blocks.positive * &haar_isometry(dp, k2, mix_seed(seed, 1))?,
            u: &blocks.negative * &haar_isometry(dn, k2, mix_seed(seed, 2))?,
            x: ComplexMatrix::zeros(shifted.dim(), k2),
        })
    }

    /// Default parameters: `V_0` filled greedily with kernel eigenvectors,
    /// Haar `V_+` and `U` for the remaining rank, `X = 0`.
    pub fn canonical(shifted: &HermitianEigenSystem, k: usize, seed: u64) -> Result<Self> {
        let blocks = SpectralSplit::new(shifted);
        let (dn, d0, dp) = blocks.dims();
        let k1 = k.min(d0);
        let k2 = k - k1;
        check_split(&blocks, k1, k2)?;
        let first: Vec<usize> = (0..k1).collect();
        Ok(Self {
            split: (k1, k2),
            v0: blocks.kernel.select_columns(&first),
            vplus: &blocks.positive * &haar_isometry(dp, k2, mix_seed(seed, 1))?,
            u: &blocks.negative * &haar_isometry(dn, k2, mix_seed(seed, 2))?,
            x: ComplexMatrix::zeros(shifted.dim(), k2),
        })
    }

    /// Replaces `X` with a random Gaussian map into `ker A ∩ V_0^⊥`.
    pub fn with_random_x(mut self, shifted: &HermitianEigenSystem, seed: u64) -> Self {
        let blocks = SpectralSplit::new(shifted);
        let d0 = blocks.kernel.cols();
        let k2 = self.split.1;
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 3));
        let g = ComplexMatrix::from_fn(d0, k2, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        });
        let z = &blocks.kernel * &g;
        let along_v0 = &self.v0 * &self.v0.adjoint_mul(&z).expect("conformable");
        self.x = &z - &along_v0;
        self
    }

    /// Basis (not orthonormalized) of `V`: `[V_0 | v_+ + Xv_+ + Uv_+]`.
    pub fn subspace_basis(&self) -> ComplexMatrix {
        let mixed = &(&self.vplus + &self.x) + &self.u;
        self.v0.hstack(&mixed).expect("parameter blocks share N")
    }

    fn validate(&self, blocks: &SpectralSplit) -> Result<()> {
        let (k1, k2) = self.split;
        let n = blocks.kernel.rows();
        check_split(blocks, k1, k2)?;
        let shapes = [
            ("v0", &self.v0, k1),
            ("vplus", &self.vplus, k2),
            ("u", &self.u, k2),
            ("x", &self.x, k2),
        ];
        for (name, m, cols) in shapes {
            if m.shape() != (n, cols) {
                return Err(Error::InvalidParameters(format!(
                    "{name} is {}×{}, expected {n}×{cols}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        for (name, m) in [("v0", &self.v0), ("vplus", &self.vplus), ("u", &self.u)] {
            let dev = m.isometry_deviation();
            if dev > PARAM_TOL {
                return Err(Error::InvalidParameters(format!(
                    "{name} is not an isometry (deviation {dev:.2e})"
                )));
            }
        }
        let outside = |m: &ComplexMatrix, proj: ComplexMatrix| (m - &proj).frobenius_norm();
        let checks = [
            (
                "v0 ⊄ ker",
                outside(&self.v0, blocks.project_kernel(&self.v0)),
                1.0,
            ),
            (
                "vplus ⊄ P+",
                outside(&self.vplus, blocks.project_positive(&self.vplus)),
                1.0,
            ),
            (
                "u ⊄ P−",
                outside(&self.u, blocks.project_negative(&self.u)),
                1.0,
            ),
            (
                "x ⊄ ker",
                outside(&self.x, blocks.project_kernel(&self.x)),
                self.x.frobenius_norm().max(1.0),
            ),
            (
                "x ⊄ V0⊥",
                self.v0.adjoint_mul(&self.x)?.frobenius_norm(),
                self.x.frobenius_norm().max(1.0),
            ),
        ];
        for (what, err, scale) in checks {
            if err > PARAM_TOL * scale {
                return Err(Error::InvalidParameters(format!(
                    "{what} (error {err:.2e})"
                )));
            }
        }
        Ok(())
    }
}

fn check_split(blocks: &SpectralSplit, k1: usize, k2: usize) -> Result<()> {
    let (dn, d0, dp) = blocks.dims();
    if k1 > d0 || k2 > dn.min(dp) {
        return Err(Error::InfeasibleSplit {
            k: k1 + k2,
            kernel: d0,
            positive: dp,
            negative: dn,
        });
    }
    Ok(())
}

/// `f(A)` with the kernel cluster mapped to 1.
fn f_of(shifted: &HermitianEigenSystem, power: f64) -> ComplexMatrix {
    let tol = CLUSTER_TOL * shifted.scale_ref();
    shifted.spectral_function(|a| {
        if a.abs() <= tol {
            1.0
        } else {
            a.abs().powf(power)
        }
    })
}

/// Builds `P_W`, `W = f(A)V`, for the shifted matrix `A` (target value 0).
///
/// Without `params`, [`GeneralParams::canonical`] is used with `seed`
/// (default 0). The returned projection has `λ = 0` and its residual is
/// measured against the reconstructed shifted matrix.
pub fn construct_projection_general(
    shifted: &HermitianEigenSystem,
    k: usize,
    params: Option<&GeneralParams>,
    seed: Option<u64>,
) -> Result<CompressionProjection> {
    if !contains_in_eig(shifted, k, 0.0)? {
        return Err(Error::LambdaOutOfRange { lambda: 0.0, k });
    }
    let blocks = SpectralSplit::new(shifted);
    let owned;
    let params = match params {
        Some(p) => {
            if p.rank() != k {
                return Err(Error::InvalidParameters(format!(
                    "split {:?} does not sum to k = {k}",
                    p.split
                )));
            }
            p.validate(&blocks)?;
            p
        }
        None => {
            owned = GeneralParams::canonical(shifted, k, seed.unwrap_or(0))?;
            &owned
        }
    };
    let w = &f_of(shifted, -0.5) * &params.subspace_basis();
    let frame = orthonormalize_columns(&w)?;
    if frame.cols() != k {
        return Err(Error::InvalidParameters(format!(
            "W has numerical rank {} < {k}",
            frame.cols()
        )));
    }
    let p = CompressionProjection::new(frame, C64::new(0.0, 0.0))?;
    let residual = verify_compression(&shifted.reconstruct(), &p, C64::new(0.0, 0.0))?;
    Ok(p.with_residual(residual))
}

/// [`construct_projection_general`] for `A` and `λ` directly; the result
/// carries `λ` and its residual is verified against `A`.
pub fn construct_projection_for(
    a: &ComplexMatrix,
    k: usize,
    lambda: f64,
    params: Option<&GeneralParams>,
    seed: Option<u64>,
) -> Result<CompressionProjection> {
    if !membership_hermitian(a, k, lambda)? {
        return Err(Error::LambdaOutOfRange { lambda, k });
    }
    let shifted = shifted_eig(a, lambda)?;
    construct_projection_general(&shifted, k, params, seed)?
        .with_lambda(C64::new(lambda, 0.0))
        .verified(a)
}

/// Recovers `(V_0, V_+, U, X)` for a witness `P` of `λ ∈ Λ_k(A)`.
pub fn recover_parameters(
    a: &ComplexMatrix,
    p: &CompressionProjection,
    lambda: f64,
) -> Result<GeneralParams> {
    let residual = verify_compression(a, p, C64::new(lambda, 0.0))?;
    if residual > RECOVERY_RESIDUAL_TOL * a.scale_ref() {
        return Err(Error::NotACompression { residual });
    }
    let k = p.rank();
    let shifted = shifted_eig(a, lambda)?;
    let blocks = SpectralSplit::new(&shifted);
    let (dn, d0, dp) = blocks.dims();

    let g = &f_of(&shifted, 0.5) * p.frame();
    let basis = orthonormalize_columns(&g)?;
    if basis.cols() != k {
        return Err(Error::DegenerateRecovery(format!(
            "f(A)^-1 ran P has rank {} < {k}",
            basis.cols()
        )));
    }

    // ranks of P_+V and P_−V must agree; their common value is k2
    let plus_rank = singular_values(&blocks.positive.adjoint_mul(&basis)?)
        .iter()
        .filter(|&&s| s > RECOVERY_RANK_TOL)
        .count();
    let minus_rank = singular_values(&blocks.negative.adjoint_mul(&basis)?)
        .iter()
        .filter(|&&s| s > RECOVERY_RANK_TOL)
        .count();
    if plus_rank != minus_rank {
        return Err(Error::DegenerateRecovery(format!(
            "rank P+V = {plus_rank} but rank P−V = {minus_rank}"
        )));
    }
    let k2 = plus_rank;
    let k1 = k - k2;
    if k1 > d0 || k2 > dn.min(dp) {
        return Err(Error::DegenerateRecovery(format!(
            "split ({k1}, {k2}) exceeds eigenspace dimensions ({dn}, {d0}, {dp})"
        )));
    }

    // Gram of P_+ on V: its null directions span V_0
    let coords = blocks.positive.adjoint_mul(&basis)?;
    let h = coords.adjoint_mul(&coords)?;
    let h_eig = hermitian_eig(&h.hermitian_part())?;
    let null_dirs: Vec<usize> = (0..k1).collect();
    let mixed_dirs: Vec<usize> = (k1..k).collect();

    let v0 = if k1 == 0 {
        ComplexMatrix::zeros(a.rows(), 0)
    } else {
        let raw = &basis * &h_eig.select(&null_dirs);
        let v0 = orthonormalize_columns(&blocks.project_kernel(&raw))?;
        if v0.cols() != k1 {
            return Err(Error::DegenerateRecovery(
                "kernel part of V lost rank".into(),
            ));
        }
        v0
    };

    let z = &basis * &h_eig.select(&mixed_dirs);
    let z = &z - &(&v0 * &v0.adjoint_mul(&z)?);
    let zp = blocks.project_positive(&z);
    let zn = blocks.project_negative(&z);
    let zk = blocks.project_kernel(&z);
    // H is diagonal in these directions, so P_+z has orthogonal columns
    let norms: Vec<f64> = (0..k2)
        .map(|j| crate::linalg::norm(&zp.column(j)))
        .collect();
    if norms.iter().any(|&s| s <= RECOVERY_RANK_TOL) {
        return Err(Error::DegenerateRecovery("P+V lost rank".into()));
    }
    let scale_cols =
        |m: &ComplexMatrix| ComplexMatrix::from_fn(m.rows(), k2, |i, j| m[(i, j)] / norms[j]);
    Ok(GeneralParams {
        split: (k1, k2),
        v0,
        vplus: scale_cols(&zp),
        u: scale_cols(&zn),
        x: scale_cols(&zk),
    })
}

/// `max_j |‖P_+g_j‖ − ‖P_−g_j‖|` over an orthonormal basis `g_j` of the span
/// of `v`. Zero exactly when `f(A)·span(v)` is compressed to zero.
pub fn isometry_defect(shifted: &HermitianEigenSystem, v: &ComplexMatrix) -> Result<f64> {
    let blocks = SpectralSplit::new(shifted);
    let basis = orthonormalize_columns(v)?;
    let plus = blocks.positive.adjoint_mul(&basis)?;
    let minus = blocks.negative.adjoint_mul(&basis)?;
    Ok((0..basis.cols())
        .map(|j| {
            let np = crate::linalg::norm(&plus.column(j));
            let nm = crate::linalg::norm(&minus.column(j));
            (np - nm).abs()
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::principal_angles;
    use crate::projection::pairing_projection;

    #[test]
    fn hand_example_with_unit_shift_blocks() {
        // A = diag(−1, −2, 1, 2), λ = 0, V_+ = span{e3, e4}, U: e3→e1, e4→e2
        let a = ComplexMatrix::real_diag(&[-1.0, -2.0, 1.0, 2.0]);
        let shifted = shifted_eig(&a, 0.0).unwrap();
        let e = ComplexMatrix::identity(4);
        let params = GeneralParams {
            split: (0, 2),
            v0: ComplexMatrix::zeros(4, 0),
            vplus: e.select_columns(&[2, 3]),
            u: e.select_columns(&[0, 1]),
            x: ComplexMatrix::zeros(4, 2),
        };
        let p = construct_projection_general(&shifted, 2, Some(&params), None).unwrap();
        assert!(verify_compression(&a, &p, C64::new(0.0, 0.0)).unwrap() < 1e-15);
        // W = span{e1 + e3, e2 + e4}, f(A) = diag(1, 1/√2, 1, 1/√2)
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected =
            ComplexMatrix::from_real_rows(&[&[h, 0.0], &[0.0, h], &[h, 0.0], &[0.0, h]]).unwrap();
        let angles = principal_angles(p.frame(), &expected).unwrap();
        assert!(angles.iter().all(|&t| t < 1e-15));
    }

    #[test]
    fn kernel_case_takes_eigenprojection() {
        let a = ComplexMatrix::real_diag(&[-1.0, 0.5, 0.5, 0.5, 3.0]);
        let p = construct_projection_for(&a, 2, 0.5, None, Some(4)).unwrap();
        assert!(p.residual().unwrap() < 1e-15);
        let shifted = shifted_eig(&a, 0.5).unwrap();
        let params = GeneralParams::canonical(&shifted, 2, 4).unwrap();
        assert_eq!(params.split, (2, 0));
    }

    #[test]
    fn infeasible_split_is_reported() {
        let a = ComplexMatrix::real_diag(&[-1.0, 0.0, 1.0, 2.0]);
        let shifted = shifted_eig(&a, 0.0).unwrap();
        assert_eq!(feasible_splits(&shifted, 2), vec![(1, 1)]);
        assert!(matches!(
            GeneralParams::sample(&shifted, (0, 2), 1),
            Err(Error::InfeasibleSplit { .. })
        ));
    }

    #[test]
    fn random_x_stays_in_kernel_complement() {
        let a = ComplexMatrix::real_diag(&[-2.0, -1.0, 0.0, 0.0, 0.0, 1.0, 2.0]);
        let shifted = shifted_eig(&a, 0.0).unwrap();
        let params = GeneralParams::sample(&shifted, (1, 2), 9)
            .unwrap()
            .with_random_x(&shifted, 9);
        assert!(params.x.frobenius_norm() > 0.1);
        let p = construct_projection_general(&shifted, 3, Some(&params), None).unwrap();
        assert!(verify_compression(&a, &p, C64::new(0.0, 0.0)).unwrap() < 1e-13);
    }

    #[test]
    fn recovery_of_kernel_witness() {
        let a = ComplexMatrix::real_diag(&[-1.0, 0.5, 0.5, 3.0]);
        let frame = ComplexMatrix::identity(4).select_columns(&[1, 2]);
        let p = CompressionProjection::new(frame, C64::new(0.5, 0.0)).unwrap();
        let params = recover_parameters(&a, &p, 0.5).unwrap();
        assert_eq!(params.split, (2, 0));
        assert_eq!(params.u.cols(), 0);
        assert_eq!(params.x.cols(), 0);
    }

    #[test]
    fn recovery_roundtrip_for_pairing_witness() {
        let a = ComplexMatrix::real_diag(&[0.0, 1.0, 2.0, 3.0]);
        let eig = hermitian_eig(&a).unwrap();
        let p = pairing_projection(&eig, 2, 1.5, &[], Some(&[(0, 2), (1, 3)])).unwrap();
        let params = recover_parameters(&a, &p, 1.5).unwrap();
        let shifted = shifted_eig(&a, 1.5).unwrap();
        let rebuilt = construct_projection_general(&shifted, 2, Some(&params), None).unwrap();
        let angles = principal_angles(p.frame(), rebuilt.frame()).unwrap();
        assert!(angles.iter().all(|&t| t <= 1e-8), "{angles:?}");
    }

    #[test]
    fn recovery_rejects_non_witness() {
        let a = ComplexMatrix::real_diag(&[0.0, 1.0, 2.0, 3.0]);
        let frame = ComplexMatrix::identity(4).select_columns(&[0, 1]);
        let p = CompressionProjection::new(frame, C64::new(1.5, 0.0)).unwrap();
        assert!(matches!(
            recover_parameters(&a, &p, 1.5),
            Err(Error::NotACompression { .. })
        ));
    }
}
