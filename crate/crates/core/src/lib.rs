//! Higher-rank numerical ranges `Λ_k(T)`.
//!
//! `λ ∈ Λ_k(T)` when some rank-`k` orthogonal projection `P` satisfies
//! `PTP = λP`, i.e. `λ·I_k` is a compression of `T`. The crate computes these
//! sets exactly where closed forms exist (Hermitian matrices), bounds them for
//! normal matrices, builds and verifies the witnessing projections, and
//! probes everything else numerically.
//!
//! Module map:
//! - [`linalg`]: dense complex matrices, Jacobi eigensolver, SVD, Haar frames.
//! - [`range`]: closed-form ranges of Hermitian matrices.
//! - [`projection`]: witness constructions, parameter recovery, verification.
//! - [`normal`]: convex-hull outer bounds for normal matrices.
//! - [`search`]: residual minimization over rank-`k` frames.
//! - [`qec`]: error-correction conditions as joint compression problems.
//! - [`io`] and [`cli`]: file formats and the `hrnr` command line.

pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod normal;
pub mod projection;
pub mod qec;
pub mod range;
pub mod search;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, HermitianEigenSystem, C64};
pub use projection::CompressionProjection;
pub use range::RankKRange;
