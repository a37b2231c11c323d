//! Rank-`k` compression witnesses: projections `P` with `PTP = λP`.
//!
//! A projection is carried by an orthonormal frame `F` (`N×k`) with
//! `P = FF*`; the residual `‖PTP − λP‖_F` equals `‖F*TF − λI_k‖_F`.

mod corollary;
mod general;
mod pairing;

pub use corollary::general_matrix_projection;
pub use general::{
    construct_projection_for, construct_projection_general, feasible_splits, isometry_defect,
    recover_parameters, shifted_eig, GeneralParams, SpectralSplit, CLUSTER_TOL,
};
pub use pairing::{pairing_params, pairing_projection, PairingParams};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

/// Frame orthonormality tolerance `‖F*F − I‖_F`.
pub const FRAME_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionProjection {
    frame: ComplexMatrix,
    lambda: C64,
    residual: Option<f64>,
}

impl CompressionProjection {
    /// Wraps an orthonormal frame; the residual is left unset.
    pub fn new(frame: ComplexMatrix, lambda: C64) -> Result<Self> {
        let deviation = frame.isometry_deviation();
        if !(deviation <= FRAME_TOL) {
            return Err(Error::FrameNotOrthonormal { deviation });
        }
        Ok(Self {
            frame,
            lambda,
            residual: None,
        })
    }

    pub fn frame(&self) -> &ComplexMatrix {
        &self.frame
    }

    pub fn rank(&self) -> usize {
        self.frame.cols()
    }

    /// Ambient dimension `N`.
    pub fn dim(&self) -> usize {
        self.frame.rows()
    }

    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    pub fn residual(&self) -> Option<f64> {
        self.residual
    }

    pub fn with_lambda(mut self, lambda: C64) -> Self {
        self.lambda = lambda;
        self.residual = None;
        self
    }

    pub fn with_residual(mut self, residual: f64) -> Self {
        self.residual = Some(residual);
        self
    }

    /// Verifies against `t` at the stored `λ` and records the residual.
    pub fn verified(self, t: &ComplexMatrix) -> Result<Self> {
        let r = verify_compression(t, &self, self.lambda)?;
        Ok(self.with_residual(r))
    }

    /// `P = FF*`.
    pub fn projector(&self) -> ComplexMatrix {
        &self.frame * &self.frame.adjoint()
    }

    /// Block frame `F_1 ⊕ F_2`, witnessing `T ⊕ S` at a common `λ`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        Self {
            frame: self.frame.direct_sum(&other.frame),
            lambda: self.lambda,
            residual: None,
        }
    }
}

/// `‖PTP − λP‖_F`, evaluated as `‖F*TF − λI_k‖_F`.
pub fn verify_compression(
    t: &ComplexMatrix,
    p: &CompressionProjection,
    lambda: C64,
) -> Result<f64> {
    if !t.is_square() || t.rows() != p.dim() {
        return Err(Error::ShapeMismatch(format!(
            "verify {}×{} matrix against a frame in C^{}",
            t.rows(),
            t.cols(),
            p.dim()
        )));
    }
    let deviation = p.frame.isometry_deviation();
    if !(deviation <= FRAME_TOL) {
        return Err(Error::FrameNotOrthonormal { deviation });
    }
    let compressed = p.frame.adjoint_mul(&(t * &p.frame))?;
    Ok(compressed.shift_diagonal(-lambda).frobenius_norm())
}
