//! Dense complex matrices and the decompositions the rest of the crate
//! is built on.
//!
//! Everything here is small and dense: the matrices of interest are a few
//! dozen rows at most, so clarity wins over blocking or SIMD.

mod eigen;
mod ortho;
mod svd;

pub use eigen::{hermitian_eig, HermitianEigenSystem, MAX_JACOBI_SWEEPS};
pub use ortho::{haar_isometry, orthonormalize, orthonormalize_columns};
pub use svd::{null_space, numerical_rank, principal_angles, singular_values};

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Isometry tolerance used by [`compress`].
pub const ISOMETRY_TOL: f64 = 1e-10;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}×{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::ShapeMismatch("columns of unequal length".into()));
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
    }

    pub fn real_diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<C64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    /// Columns `range` as a new matrix.
    pub fn select_columns(&self, indices: &[usize]) -> Self {
        Self::from_fn(self.rows, indices.len(), |i, j| self[(i, indices[j])])
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "hstack of {}×{} and {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                other[(i, j - self.cols)]
            }
        }))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "product of {}×{} and {}×{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == ZERO {
                    continue;
                }
                let rrow = rhs.row(l);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self* · rhs` without materialising the adjoint.
    pub fn adjoint_mul(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "adjoint product of {}×{} and {}×{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.cols, rhs.cols);
        for l in 0..self.rows {
            let arow = self.row(l);
            let brow = rhs.row(l);
            for (i, a) in arow.iter().enumerate() {
                let a = a.conj();
                if a == ZERO {
                    continue;
                }
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::ShapeMismatch(format!(
                "elementwise op on {}×{} and {}×{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// `self + shift·I` for square matrices.
    pub fn shift_diagonal(&self, shift: C64) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] += shift;
        }
        m
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max(1, ‖self‖_F)`, the reference scale for relative tolerances.
    pub fn scale_ref(&self) -> f64 {
        self.frobenius_norm().max(1.0)
    }

    /// `‖A − A*‖_F`; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol * self.scale_ref()
    }

    /// `‖TT* − T*T‖_F`.
    pub fn normality_deviation(&self) -> Result<f64> {
        let a = self.try_mul(&self.adjoint())?;
        let b = self.adjoint_mul(self)?;
        Ok(a.try_sub(&b)?.frobenius_norm())
    }

    /// `‖V*V − I‖_F`.
    pub fn isometry_deviation(&self) -> f64 {
        let g = self
            .adjoint_mul(self)
            .expect("self-product is always conformable");
        g.try_sub(&Self::identity(self.cols))
            .expect("square gram")
            .frobenius_norm()
    }

    /// Hermitian part `(T + T*)/2`.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        self.zip_with(&adj, |a, b| (a + b) * 0.5)
            .expect("hermitian part requires a square matrix")
    }

    /// Skew part as a Hermitian matrix, `(T − T*)/(2i)`.
    pub fn imaginary_part(&self) -> Self {
        let adj = self.adjoint();
        self.zip_with(&adj, |a, b| (a - b) * C64::new(0.0, -0.5))
            .expect("imaginary part requires a square matrix")
    }

    /// Block diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (r1, c1) = self.shape();
        Self::from_fn(r1 + other.rows, c1 + other.cols, |i, j| {
            if i < r1 && j < c1 {
                self[(i, j)]
            } else if i >= r1 && j >= c1 {
                other[(i - r1, j - c1)]
            } else {
                ZERO
            }
        })
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "vector length must match columns");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}×{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Compression `V* T V` of a square `T` to the range of the isometry `V`.
pub fn compress(t: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !t.is_square() || t.rows() != v.rows() {
        return Err(Error::ShapeMismatch(format!(
            "compress of {}×{} by {}×{}",
            t.rows(),
            t.cols(),
            v.rows(),
            v.cols()
        )));
    }
    let deviation = v.isometry_deviation();
    if !(deviation <= ISOMETRY_TOL) {
        return Err(Error::NotIsometry { deviation });
    }
    v.adjoint_mul(&(t * v))
}

pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
