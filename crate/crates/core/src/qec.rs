//! Error-correction conditions as joint compression problems.
//!
//! A code with projection `P` corrects the errors `{A_i}` iff
//! `P A_i*A_j P = λ_ij P` for all `i, j`, so each `λ_ij` is a rank-`k`
//! compression value of `A_i*A_j` witnessed by one common `P`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{haar_isometry, principal_angles, ComplexMatrix, C64};
use crate::projection::CompressionProjection;
use crate::search::{descend, Objective, SearchConfig};

/// Default relative tolerance of [`code_check`].
pub const CODE_TOL: f64 = 1e-10;
/// Codes closer than this largest principal angle are the same code.
const DISTINCT_ANGLE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorModel {
    kraus: Vec<ComplexMatrix>,
}

impl ErrorModel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidParameters("empty error model".into()))?;
        let n = first.rows();
        if kraus.iter().any(|a| a.shape() != (n, n)) {
            return Err(Error::ShapeMismatch(format!(
                "error operators must all be {n}×{n}"
            )));
        }
        Ok(Self { kraus })
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].rows()
    }

    /// `max(1, max_i ‖A_i‖_F²)`.
    pub fn scale_ref(&self) -> f64 {
        self.kraus
            .iter()
            .map(|a| a.frobenius_norm().powi(2))
            .fold(1.0, f64::max)
    }

    /// `A_i*A_j`, row-major over `(i, j)`.
    pub fn products(&self) -> Vec<ComplexMatrix> {
        let m = self.kraus.len();
        (0..m * m)
            .map(|ij| {
                self.kraus[ij / m]
                    .adjoint_mul(&self.kraus[ij % m])
                    .expect("uniform dimensions")
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodeReport {
    /// `λ_ij = tr(F*A_i*A_jF)/k`.
    pub lambda_matrix: ComplexMatrix,
    /// `‖F*A_i*A_jF − λ_ij I‖_F`.
    pub residuals: Vec<Vec<f64>>,
    pub max_residual: f64,
    pub correctable: bool,
}

/// Checks the correction conditions on the code `ran P`. Correctable iff
/// every residual is at most `tol·max(1, max_i ‖A_i‖_F²)`.
pub fn code_check(
    errors: &ErrorModel,
    p: &CompressionProjection,
    tol: Option<f64>,
) -> Result<CodeReport> {
    let n = errors.dim();
    if p.dim() != n {
        return Err(Error::ShapeMismatch(format!(
            "code in C^{} for operators on C^{n}",
            p.dim()
        )));
    }
    let tol = tol.unwrap_or(CODE_TOL);
    let f = p.frame();
    let k = p.rank() as f64;
    let images: Vec<ComplexMatrix> = errors.operators().iter().map(|a| a * f).collect();
    let m = images.len();
    let mut lambda_matrix = ComplexMatrix::zeros(m, m);
    let mut residuals = vec![vec![0.0; m]; m];
    let mut max_residual: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let mij = images[i].adjoint_mul(&images[j])?;
            let lambda = mij.trace() / k;
            let r = mij.shift_diagonal(-lambda).frobenius_norm();
            lambda_matrix[(i, j)] = lambda;
            residuals[i][j] = r;
            max_residual = max_residual.max(r);
        }
    }
    Ok(CodeReport {
        lambda_matrix,
        residuals,
        max_residual,
        correctable: max_residual <= tol * errors.scale_ref(),
    })
}

/// `Σ_ij ‖V*E_ijV − (tr/k)I‖_F²` with `E_ij = A_i*A_j`.
struct JointObjective {
    products: Vec<ComplexMatrix>,
    adjoints: Vec<ComplexMatrix>,
}

impl JointObjective {
    fn new(errors: &ErrorModel) -> Self {
        let products = errors.products();
        let adjoints = products.iter().map(|e| e.adjoint()).collect();
        Self { products, adjoints }
    }

    fn traceless(m: ComplexMatrix) -> ComplexMatrix {
        let k = m.rows() as f64;
        let mean = m.trace() / k;
        m.shift_diagonal(-mean)
    }
}

impl Objective for JointObjective {
    fn value(&self, v: &ComplexMatrix) -> f64 {
        self.products
            .iter()
            .map(|e| {
                let m = v.adjoint_mul(&(e * v)).expect("conformable");
                Self::traceless(m).frobenius_norm().powi(2)
            })
            .sum()
    }

    fn value_and_gradient(&self, v: &ComplexMatrix) -> (f64, ComplexMatrix) {
        let mut total = 0.0;
        let mut g = ComplexMatrix::zeros(v.rows(), v.cols());
        for (e, e_adj) in self.products.iter().zip(&self.adjoints) {
            let ev = e * v;
            let r = Self::traceless(v.adjoint_mul(&ev).expect("conformable"));
            total += r.frobenius_norm().powi(2);
            // 2(E*VR + EVR*); the trace projection is self-adjoint
            g = &g + &(&(e_adj * &(v * &r)) + &(&ev * &r.adjoint()));
        }
        (total, g.scale_real(2.0))
    }

    fn residuals(&self, v: &ComplexMatrix) -> Vec<C64> {
        self.products
            .iter()
            .flat_map(|e| {
                let m = v.adjoint_mul(&(e * v)).expect("conformable");
                Self::traceless(m).as_slice().to_vec()
            })
            .collect()
    }

    fn residuals_derivative(&self, v: &ComplexMatrix, d: &ComplexMatrix) -> Vec<C64> {
        self.products
            .iter()
            .flat_map(|e| {
                let a = d.adjoint_mul(&(e * v)).expect("conformable");
                let b = v.adjoint_mul(&(e * d)).expect("conformable");
                Self::traceless(&a + &b).as_slice().to_vec()
            })
            .collect()
    }
}

/// Searches for rank-`k` codes: every restart runs, sub-tolerance results
/// are re-validated by [`code_check`] at `cfg.residual_tol`, duplicates (all
/// principal angles `≤ 1e−6`) are dropped, and the rest are ranked by
/// `max_residual`.
pub fn joint_search(
    errors: &ErrorModel,
    k: usize,
    cfg: &SearchConfig,
) -> Result<Vec<(CompressionProjection, CodeReport)>> {
    cfg.validate()?;
    let n = errors.dim();
    if k < 2 || k > n {
        return Err(Error::BadRank { k, n });
    }
    let obj = JointObjective::new(errors);
    let target_sq = (1e-4 * cfg.residual_tol).powi(2);
    let runs: Vec<Result<Option<(usize, CompressionProjection, CodeReport)>>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|restart| {
            let v0 = haar_isometry(n, k, cfg.restart_seed(restart))?;
            let (v, _) = descend(&obj, v0, cfg, target_sq);
            let p = CompressionProjection::new(v, C64::new(0.0, 0.0))?;
            let report = code_check(errors, &p, Some(cfg.residual_tol / errors.scale_ref()))?;
            Ok(report.correctable.then_some((restart, p, report)))
        })
        .collect();

    let mut found: Vec<(usize, CompressionProjection, CodeReport)> = Vec::new();
    for run in runs {
        if let Some(hit) = run? {
            found.push(hit);
        }
    }
    found.sort_by(|a, b| {
        a.2.max_residual
            .total_cmp(&b.2.max_residual)
            .then(a.0.cmp(&b.0))
    });
    let mut distinct: Vec<(CompressionProjection, CodeReport)> = Vec::new();
    for (_, p, report) in found {
        let mut duplicate = false;
        for (q, _) in &distinct {
            let angles = principal_angles(p.frame(), q.frame())?;
            if angles.iter().all(|&a| a <= DISTINCT_ANGLE) {
                duplicate = true;
                break;
            }
        }
        if !duplicate {
            let residual = report.max_residual;
            distinct.push((p.with_residual(residual), report));
        }
    }
    Ok(distinct)
}

/// Pauli operator `op` on qubit `q` (0 = leftmost) of an `n`-qubit register.
pub fn pauli_on(op: char, q: usize, n: usize) -> Result<ComplexMatrix> {
    let (o, i1) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    let single = match op {
        'I' => ComplexMatrix::identity(2),
        'X' => ComplexMatrix::from_rows(&[vec![o, i1], vec![i1, o]])?,
        'Y' => ComplexMatrix::from_rows(&[vec![o, -C64::i()], vec![C64::i(), o]])?,
        'Z' => ComplexMatrix::real_diag(&[1.0, -1.0]),
        _ => return Err(Error::InvalidParameters(format!("unknown Pauli {op}"))),
    };
    if q >= n {
        return Err(Error::InvalidParameters(format!("qubit {q} of {n}")));
    }
    let id = ComplexMatrix::identity(2);
    Ok((0..n).fold(ComplexMatrix::identity(1), |acc, j| {
        kron(&acc, if j == q { &single } else { &id })
    }))
}

/// Kronecker product.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = b.shape();
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}
