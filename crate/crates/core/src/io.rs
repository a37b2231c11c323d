//! JSON file formats for matrices, projections, spectra and error models.
//!
//! Complex numbers are `[re, im]` pairs. Floats are written in shortest
//! round-trip form, so parse → serialize reproduces every finite double.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{orthonormalize_columns, ComplexMatrix, C64};
use crate::normal::SpectrumList;
use crate::projection::{CompressionProjection, FRAME_TOL};
use crate::qec::ErrorModel;

/// Orthonormality tolerance applied when loading a projection frame.
pub const LOAD_FRAME_TOL: f64 = 1e-8;
/// Tolerance for the `hermitian` flag, relative to `max(1, ‖A‖_F)`.
pub const HERMITIAN_FLAG_TOL: f64 = 1e-12;

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

/// Dense matrix, entries row-major as nested arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hermitian: Option<bool>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries: (0..m.rows())
                .map(|i| m.row(i).iter().map(|&z| pair(z)).collect())
                .collect(),
            name: None,
            hermitian: None,
        }
    }

    /// Checks dimensions and the `hermitian` flag, if present.
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.entries.len() != self.rows || self.entries.iter().any(|r| r.len() != self.cols) {
            return Err(Error::Format(format!(
                "entries do not form a {}×{} array",
                self.rows, self.cols
            )));
        }
        let data: Vec<C64> = self.entries.iter().flatten().map(|&p| unpair(p)).collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Format("non-finite entry".into()));
        }
        let m = ComplexMatrix::from_vec(self.rows, self.cols, data)?;
        if self.hermitian == Some(true) && !m.is_hermitian(HERMITIAN_FLAG_TOL) {
            return Err(Error::NotHermitian {
                deviation: m.hermitian_deviation(),
            });
        }
        Ok(m)
    }
}

/// A rank-`k` projection as its frame columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionFile {
    pub n: usize,
    pub k: usize,
    /// `k` columns of length `n`.
    pub frame: Vec<Vec<[f64; 2]>>,
    pub lambda: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

impl ProjectionFile {
    pub fn from_projection(p: &CompressionProjection) -> Self {
        Self {
            n: p.dim(),
            k: p.rank(),
            frame: (0..p.rank())
                .map(|j| p.frame().column(j).into_iter().map(pair).collect())
                .collect(),
            lambda: pair(p.lambda()),
            residual: p.residual(),
        }
    }

    /// Frames within `1e−8` of orthonormal are accepted; those outside the
    /// working tolerance are re-orthonormalized.
    pub fn to_projection(&self) -> Result<CompressionProjection> {
        if self.frame.len() != self.k || self.frame.iter().any(|c| c.len() != self.n) {
            return Err(Error::Format(format!(
                "frame is not {} columns of length {}",
                self.k, self.n
            )));
        }
        let columns: Vec<Vec<C64>> = self
            .frame
            .iter()
            .map(|c| c.iter().map(|&p| unpair(p)).collect())
            .collect();
        let mut frame = ComplexMatrix::from_columns(&columns)?;
        let deviation = frame.isometry_deviation();
        if !(deviation <= LOAD_FRAME_TOL) {
            return Err(Error::FrameNotOrthonormal { deviation });
        }
        if deviation > FRAME_TOL {
            frame = orthonormalize_columns(&frame)?;
        }
        let mut p = CompressionProjection::new(frame, unpair(self.lambda))?;
        if let Some(r) = self.residual {
            p = p.with_residual(r);
        }
        Ok(p)
    }
}

/// Eigenvalue list of a normal matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFile {
    pub spectrum: Vec<[f64; 2]>,
}

impl SpectrumFile {
    pub fn to_spectrum(&self) -> Result<SpectrumList> {
        SpectrumList::new(self.spectrum.iter().map(|&p| unpair(p)).collect())
    }
}

/// Error operators `{A_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorsFile {
    pub kraus: Vec<MatrixFile>,
}

impl ErrorsFile {
    pub fn to_model(&self) -> Result<ErrorModel> {
        ErrorModel::new(
            self.kraus
                .iter()
                .map(MatrixFile::to_matrix)
                .collect::<Result<_>>()?,
        )
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json(value)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    read_json::<MatrixFile>(path)?.to_matrix()
}

pub fn read_projection(path: &Path) -> Result<CompressionProjection> {
    read_json::<ProjectionFile>(path)?.to_projection()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_roundtrip_is_bit_exact() {
        let m = ComplexMatrix::from_fn(2, 3, |i, j| {
            C64::new(0.1 * (i as f64) - 1.0 / 3.0, (j as f64).sqrt() * 1e-300)
        });
        let text = to_json(&MatrixFile::from_matrix(&m));
        let back: MatrixFile = serde_json::from_str(&text).unwrap();
        let m2 = back.to_matrix().unwrap();
        for (a, b) in m.as_slice().iter().zip(m2.as_slice()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        assert_eq!(to_json(&back), text);
    }

    #[test]
    fn hermitian_flag_is_validated() {
        let text =
            r#"{"rows":2,"cols":2,"entries":[[[0,0],[1,0]],[[2,0],[0,0]]],"hermitian":true}"#;
        let f: MatrixFile = serde_json::from_str(text).unwrap();
        assert!(matches!(f.to_matrix(), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn ragged_entries_are_rejected() {
        let text = r#"{"rows":2,"cols":2,"entries":[[[0,0],[1,0]],[[2,0]]]}"#;
        let f: MatrixFile = serde_json::from_str(text).unwrap();
        assert!(matches!(f.to_matrix(), Err(Error::Format(_))));
    }

    #[test]
    fn projection_load_tolerance() {
        // √½ rounded to 9 digits, as a hand-written file would have it
        let h = (0.5f64.sqrt() * 1e9).round() / 1e9;
        let f = ProjectionFile {
            n: 2,
            k: 1,
            frame: vec![vec![[h, 0.0], [h, 0.0]]],
            lambda: [0.0, 0.0],
            residual: None,
        };
        let p = f.to_projection().unwrap();
        assert!(p.frame().isometry_deviation() <= FRAME_TOL);

        let bad = ProjectionFile {
            frame: vec![vec![[1.0, 0.0], [1.0, 0.0]]],
            ..f
        };
        assert!(matches!(
            bad.to_projection(),
            Err(Error::FrameNotOrthonormal { .. })
        ));
    }
}
