//! Numerical probing of `Λ_k(T)` by residual minimization.
//!
//! Minimizes `r(V) = ‖V*TV − λI_k‖_F` over `N×k` isometries by gradient
//! descent with an Armijo line search and retraction by re-orthonormalizing
//! the columns. A residual under tolerance certifies membership (up to that
//! tolerance). A residual above it certifies nothing: the descent can stall in
//! a local minimum.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    haar_isometry, hermitian_eig, null_space, orthonormalize_columns, ComplexMatrix, C64,
};
use crate::projection::CompressionProjection;

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-20;
/// A restart keeps descending until its residual drops this far below
/// `residual_tol`, so converged witnesses carry margin.
const POLISH_FACTOR: f64 = 1e-4;
/// Damped Gauss–Newton iterations run when gradient descent stops short.
const POLISH_ITERS: usize = 200;
/// The damped phase gives up once a step keeps this fraction of the objective.
const POLISH_STALL: f64 = 0.999;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub step_tol: f64,
    pub residual_tol: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iters: 2000,
            step_tol: 1e-12,
            residual_tol: 1e-8,
            seed: 0,
        }
    }
}

impl SearchConfig {
    /// Defaults for grid scans: fewer restarts per point.
    pub fn for_scan() -> Self {
        Self {
            restarts: 8,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if !(self.step_tol > 0.0 && self.residual_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn restart_seed(&self, restart: usize) -> u64 {
        self.seed.wrapping_add(restart as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_frame: CompressionProjection,
    pub best_residual: f64,
    pub restart_index: usize,
    pub converged: bool,
}

/// A smooth function of an isometric frame, invariant under `V ↦ VQ`.
pub(crate) trait Objective {
    /// Squared residual.
    fn value(&self, v: &ComplexMatrix) -> f64;
    /// Squared residual and its gradient with respect to the real inner
    /// product `Re tr(X*Y)`.
    fn value_and_gradient(&self, v: &ComplexMatrix) -> (f64, ComplexMatrix);
    /// Residual entries whose squared norm is [`Objective::value`].
    fn residuals(&self, v: &ComplexMatrix) -> Vec<C64>;
    /// Directional derivative of [`Objective::residuals`] along `d`.
    fn residuals_derivative(&self, v: &ComplexMatrix, d: &ComplexMatrix) -> Vec<C64>;
}

/// `‖V*TV − λI‖_F²`.
pub(crate) struct CompressionObjective<'a> {
    pub t: &'a ComplexMatrix,
    pub t_adj: ComplexMatrix,
    pub lambda: C64,
}

impl<'a> CompressionObjective<'a> {
    pub fn new(t: &'a ComplexMatrix, lambda: C64) -> Self {
        Self {
            t,
            t_adj: t.adjoint(),
            lambda,
        }
    }

    fn defect(&self, v: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
        let tv = self.t * v;
        let r = v
            .adjoint_mul(&tv)
            .expect("conformable")
            .shift_diagonal(-self.lambda);
        (tv, r)
    }
}

impl Objective for CompressionObjective<'_> {
    fn value(&self, v: &ComplexMatrix) -> f64 {
        self.defect(v).1.frobenius_norm().powi(2)
    }

    fn value_and_gradient(&self, v: &ComplexMatrix) -> (f64, ComplexMatrix) {
        // ∇ = 2(T*VR + TVR*)
        let (tv, r) = self.defect(v);
        let g = &(&self.t_adj * &(v * &r)) + &(&tv * &r.adjoint());
        (r.frobenius_norm().powi(2), g.scale_real(2.0))
    }

    fn residuals(&self, v: &ComplexMatrix) -> Vec<C64> {
        self.defect(v).1.as_slice().to_vec()
    }

    fn residuals_derivative(&self, v: &ComplexMatrix, d: &ComplexMatrix) -> Vec<C64> {
        // D*TV + V*TD
        let a = d.adjoint_mul(&(self.t * v)).expect("conformable");
        let b = v.adjoint_mul(&(self.t * d)).expect("conformable");
        (&a + &b).as_slice().to_vec()
    }
}

fn inner_re(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x.conj() * y).re)
        .sum()
}

/// Descends from `v`; returns the final frame and squared residual.
pub(crate) fn descend(
    obj: &impl Objective,
    mut v: ComplexMatrix,
    cfg: &SearchConfig,
    target_sq: f64,
) -> (ComplexMatrix, f64) {
    let (mut f, mut g) = obj.value_and_gradient(&v);
    let mut prev: Option<(ComplexMatrix, ComplexMatrix)> = None;
    let mut step = 1.0;
    for _ in 0..cfg.max_iters {
        if f <= target_sq {
            break;
        }
        // tangent part: remove the component along the frame itself
        let h = &g - &(&v * &v.adjoint_mul(&g).expect("conformable"));
        let hh = inner_re(&h, &h);
        if hh.sqrt() <= cfg.step_tol * f.sqrt().max(f64::MIN_POSITIVE) {
            break;
        }
        // Barzilai–Borwein guess, then backtracking
        if let Some((s, y)) = &prev {
            let sy = inner_re(s, y);
            if sy > 0.0 {
                step = inner_re(s, s) / sy;
            } else {
                step *= 2.0;
            }
        }
        let accepted = loop {
            let trial = &v - &h.scale_real(step);
            if let Ok(next) = orthonormalize_columns(&trial) {
                if next.cols() == v.cols() {
                    let fn_ = obj.value(&next);
                    if fn_ <= f - ARMIJO * step * hh {
                        break Some(next);
                    }
                }
            }
            step *= 0.5;
            if step < MIN_STEP {
                break None;
            }
        };
        let Some(next) = accepted else { break };
        let moved = (&next - &v).frobenius_norm();
        let (fn_, gn) = obj.value_and_gradient(&next);
        let hn = &gn - &(&next * &next.adjoint_mul(&gn).expect("conformable"));
        prev = Some((&next - &v, &hn - &h));
        v = next;
        f = fn_;
        g = gn;
        if moved <= cfg.step_tol {
            break;
        }
    }
    if f > target_sq {
        return polish(obj, v, f, target_sq);
    }
    (v, f)
}

fn to_real(z: &[C64]) -> Vec<f64> {
    z.iter().flat_map(|w| [w.re, w.im]).collect()
}

/// Solves `(A + μI)y = b` for symmetric positive semidefinite `A` (row-major
/// `n×n`) by Cholesky; `None` if the factorization breaks down.
fn solve_damped(a: &[f64], n: usize, mu: f64, b: &[f64]) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j] + if i == j { mu } else { 0.0 };
            for p in 0..j {
                s -= l[i * n + p] * l[j * n + p];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        for p in 0..i {
            y[i] -= l[i * n + p] * y[p];
        }
        y[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for p in i + 1..n {
            y[i] -= l[p * n + i] * y[p];
        }
        y[i] /= l[i * n + i];
    }
    Some(y)
}

/// Levenberg–Marquardt on the residual entries, stepping in the orthogonal
/// complement of the frame. Gradient descent slows to a crawl where the
/// minimizer is degenerate (boundary points of `Λ_k`); a least-squares step
/// on the residual itself does not.
fn polish(
    obj: &impl Objective,
    mut v: ComplexMatrix,
    mut f: f64,
    target_sq: f64,
) -> (ComplexMatrix, f64) {
    let (n, k) = v.shape();
    if k == n {
        return (v, f);
    }
    let mut mu = f.sqrt();
    for _ in 0..POLISH_ITERS {
        if f <= target_sq {
            break;
        }
        let before = f;
        let q = null_space(&v.adjoint(), 1e-10);
        let free = q.cols();
        if free == 0 {
            break;
        }
        let r = to_real(&obj.residuals(&v));
        let m = r.len();
        // Jacobian columns: real and imaginary unit steps in each entry of Z,
        // where the frame moves along D = QZ
        let cols: Vec<Vec<f64>> = (0..free * k)
            .flat_map(|idx| [C64::new(1.0, 0.0), C64::new(0.0, 1.0)].map(move |unit| (idx, unit)))
            .map(|(idx, unit)| {
                let (a, b) = (idx / k, idx % k);
                let d = ComplexMatrix::from_fn(n, k, |i, j| {
                    if j == b {
                        q[(i, a)] * unit
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                to_real(&obj.residuals_derivative(&v, &d))
            })
            .collect();
        let mut jjt = vec![0.0; m * m];
        for col in &cols {
            for i in 0..m {
                if col[i] == 0.0 {
                    continue;
                }
                for j in 0..m {
                    jjt[i * m + j] += col[i] * col[j];
                }
            }
        }
        let mut accepted = false;
        for _ in 0..30 {
            let Some(y) = solve_damped(&jjt, m, mu, &r) else {
                mu *= 4.0;
                continue;
            };
            let z: Vec<f64> = cols
                .iter()
                .map(|c| -c.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>())
                .collect();
            let zm = ComplexMatrix::from_fn(free, k, |a, b| {
                let idx = 2 * (a * k + b);
                C64::new(z[idx], z[idx + 1])
            });
            let trial = &v + &(&q * &zm);
            if let Ok(next) = orthonormalize_columns(&trial) {
                if next.cols() == k {
                    let fn_ = obj.value(&next);
                    if fn_ < f {
                        v = next;
                        f = fn_;
                        mu = (mu * 0.25).max(f64::MIN_POSITIVE);
                        accepted = true;
                        break;
                    }
                }
            }
            mu *= 4.0;
        }
        if !accepted || f > POLISH_STALL * before {
            break;
        }
    }
    (v, f)
}

fn check_rank(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::BadRank { k, n });
    }
    Ok(())
}

/// Best frame found over `cfg.restarts` Haar-initialized descents.
///
/// Restart `r` starts from `haar_isometry(N, k, seed + r)`. Restarts run in
/// order and stop at the first converged one; ties keep the lower index.
pub fn grassmann_search(
    t: &ComplexMatrix,
    k: usize,
    lambda: C64,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    cfg.validate()?;
    if !t.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "{}×{} matrix",
            t.rows(),
            t.cols()
        )));
    }
    let n = t.rows();
    check_rank(k, n)?;
    let obj = CompressionObjective::new(t, lambda);
    let target_sq = (POLISH_FACTOR * cfg.residual_tol).powi(2);
    let mut best: Option<(ComplexMatrix, f64, usize)> = None;
    for restart in 0..cfg.restarts {
        let v0 = haar_isometry(n, k, cfg.restart_seed(restart))?;
        let (v, f) = descend(&obj, v0, cfg, target_sq);
        let r = f.sqrt();
        if best.as_ref().is_none_or(|b| r < b.1) {
            best = Some((v, r, restart));
        }
        if r <= cfg.residual_tol {
            break;
        }
    }
    let (frame, best_residual, restart_index) = best.expect("at least one restart");
    Ok(SearchResult {
        best_frame: CompressionProjection::new(frame, lambda)?.with_residual(best_residual),
        best_residual,
        restart_index,
        converged: best_residual <= cfg.residual_tol,
    })
}

/// Grid of target values: `nx × ny` points over `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    /// `[x0, x1, y0, y1]`; defaults to a padded box around `W(T)`.
    pub bbox: Option<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub lambda: C64,
    pub residual: f64,
    pub converged: bool,
}

/// `Λ_1(Re T) × Λ_1(Im T)`, which contains `W(T)` and the spectrum, padded
/// by 10% of its larger side.
pub fn default_bbox(t: &ComplexMatrix) -> Result<[f64; 4]> {
    let re = hermitian_eig(&t.hermitian_part())?.values;
    let im = hermitian_eig(&t.imaginary_part())?.values;
    let (x0, x1) = (re[0], re[re.len() - 1]);
    let (y0, y1) = (im[0], im[im.len() - 1]);
    let side = (x1 - x0).max(y1 - y0);
    let pad = 0.1 * if side > 0.0 { side } else { 1.0 };
    Ok([x0 - pad, x1 + pad, y0 - pad, y1 + pad])
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Seed for grid point `index`, independent of evaluation order.
fn point_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs [`grassmann_search`] at each grid point, rows of constant `Im λ` in
/// ascending order. Points are searched in parallel; each uses a seed
/// derived from `(cfg.seed, index)`, so the output does not depend on
/// scheduling.
pub fn scan_region(
    t: &ComplexMatrix,
    k: usize,
    grid: &Grid,
    cfg: &SearchConfig,
) -> Result<Vec<ScanPoint>> {
    cfg.validate()?;
    if grid.nx == 0 || grid.ny == 0 {
        return Err(Error::InvalidConfig("empty grid".into()));
    }
    if !t.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "{}×{} matrix",
            t.rows(),
            t.cols()
        )));
    }
    check_rank(k, t.rows())?;
    let [x0, x1, y0, y1] = match grid.bbox {
        Some(b) => b,
        None => default_bbox(t)?,
    };
    let xs = axis(x0, x1, grid.nx);
    let ys = axis(y0, y1, grid.ny);
    let points: Vec<C64> = ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| C64::new(x, y)))
        .collect();
    points
        .par_iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let local = cfg.clone().with_seed(point_seed(cfg.seed, i));
            let r = grassmann_search(t, k, lambda, &local)?;
            Ok(ScanPoint {
                lambda,
                residual: r.best_residual,
                converged: r.converged,
            })
        })
        .collect()
}
