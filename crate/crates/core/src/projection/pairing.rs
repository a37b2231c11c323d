//! Eigenvalue-pairing construction.
//!
//! Each pair `(i, i')` of eigenvalues bracketing `λ` contributes one unit
//! vector `φ = cos β·ψ_i + e^{iθ} sin β·ψ_{i'}` with
//! `cos²β = (λ − a_{i'})/(a_i − a_{i'})`, so `⟨Aφ, φ⟩ = λ`. Disjoint pairs give
//! orthogonal vectors whose cross terms vanish, hence `PAP = λP`.

use super::CompressionProjection;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianEigenSystem, C64, ZERO};
use crate::range::{contains_in_eig, MEMBERSHIP_TOL};

/// Free and determined parameters of one pairing projection. Indices are
/// 0-based positions in the ascending spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingParams {
    pub pairs: Vec<(usize, usize)>,
    /// `β_j`, fixed by `λ` and the pair.
    pub angles_beta: Vec<f64>,
    /// `θ_j`, free.
    pub phases_theta: Vec<f64>,
    /// Eigenvectors used as-is because their eigenvalue equals `λ`.
    pub singles: Vec<usize>,
}

impl PairingParams {
    pub fn cos2_beta(&self) -> Vec<f64> {
        self.angles_beta.iter().map(|b| b.cos().powi(2)).collect()
    }

    /// Coefficients of the frame in the eigenbasis (`N×k`).
    pub fn coefficients(&self, n: usize) -> ComplexMatrix {
        let k = self.pairs.len() + self.singles.len();
        let mut c = ComplexMatrix::zeros(n, k);
        for (j, (&(i, ip), (&beta, &theta))) in self
            .pairs
            .iter()
            .zip(self.angles_beta.iter().zip(&self.phases_theta))
            .enumerate()
        {
            c[(i, j)] += C64::new(beta.cos(), 0.0);
            c[(ip, j)] += C64::from_polar(beta.sin(), theta);
        }
        for (j, &s) in self.singles.iter().enumerate() {
            c[(s, self.pairs.len() + j)] = C64::new(1.0, 0.0);
        }
        c
    }
}

/// Chooses pairs and angles for `λ ∈ Λ_k(A)`.
///
/// Without an explicit `pairing`, uses `{a_{k+1−j}, a_{N−k+j}}` when those
/// pairs are disjoint (`2k ≤ N`); otherwise eigenvectors at `λ` are taken
/// directly and only the remainder is paired. `phases` may be empty (all
/// zero) or list at least one phase per pair.
pub fn pairing_params(
    eig: &HermitianEigenSystem,
    k: usize,
    lambda: f64,
    phases: &[f64],
    pairing: Option<&[(usize, usize)]>,
) -> Result<PairingParams> {
    let n = eig.dim();
    if !contains_in_eig(eig, k, lambda)? {
        return Err(Error::LambdaOutOfRange { lambda, k });
    }
    let tol = MEMBERSHIP_TOL * eig.scale_ref();
    let a = &eig.values;

    let (pairs, singles) = match pairing {
        Some(custom) => {
            validate_pairing(a, k, lambda, tol, custom)?;
            (custom.to_vec(), Vec::new())
        }
        None if 2 * k <= n => ((0..k).map(|j| (k - 1 - j, n - k + j)).collect(), Vec::new()),
        None => peel_and_pair(a, k, lambda, tol)?,
    };

    let phases_theta = if phases.is_empty() {
        vec![0.0; pairs.len()]
    } else if phases.len() >= pairs.len() {
        phases[..pairs.len()].to_vec()
    } else {
        return Err(Error::ShapeMismatch(format!(
            "{} phases for {} pairs",
            phases.len(),
            pairs.len()
        )));
    };
    let angles_beta = pairs
        .iter()
        .map(|&(i, ip)| {
            let (ai, aip) = (a[i], a[ip]);
            if ai == aip {
                0.0
            } else {
                ((lambda - aip) / (ai - aip)).clamp(0.0, 1.0).sqrt().acos()
            }
        })
        .collect();

    Ok(PairingParams {
        pairs,
        angles_beta,
        phases_theta,
        singles,
    })
}

fn validate_pairing(
    a: &[f64],
    k: usize,
    lambda: f64,
    tol: f64,
    pairs: &[(usize, usize)],
) -> Result<()> {
    let n = a.len();
    if pairs.len() != k {
        return Err(Error::BadPairing(format!(
            "{} pairs for rank {k}",
            pairs.len()
        )));
    }
    let mut used = vec![false; n];
    for &(i, ip) in pairs {
        if i >= n || ip >= n {
            return Err(Error::BadPairing(format!("pair ({i}, {ip}) out of range")));
        }
        for idx in [i, ip] {
            if used[idx] {
                return Err(Error::BadPairing(format!("index {idx} used twice")));
            }
            used[idx] = true;
        }
        let (lo, hi) = (a[i].min(a[ip]), a[i].max(a[ip]));
        if lambda < lo - tol || lambda > hi + tol {
            return Err(Error::BadPairing(format!(
                "pair ({i}, {ip}) = [{lo}, {hi}] does not bracket {lambda}"
            )));
        }
    }
    Ok(())
}

type Pairs = Vec<(usize, usize)>;

/// Degenerate case: eigenvectors at `λ` are used directly, the remaining
/// vectors pair the nearest eigenvalues below with the nearest above.
fn peel_and_pair(a: &[f64], k: usize, lambda: f64, tol: f64) -> Result<(Pairs, Vec<usize>)> {
    let at: Vec<usize> = (0..a.len())
        .filter(|&i| (a[i] - lambda).abs() <= tol)
        .collect();
    let below: Vec<usize> = (0..a.len())
        .rev()
        .filter(|&i| a[i] < lambda - tol)
        .collect();
    let above: Vec<usize> = (0..a.len()).filter(|&i| a[i] > lambda + tol).collect();
    let singles: Vec<usize> = at.into_iter().take(k).collect();
    let remaining = k - singles.len();
    if remaining > below.len().min(above.len()) {
        return Err(Error::LambdaOutOfRange { lambda, k });
    }
    let pairs = below.into_iter().zip(above).take(remaining).collect();
    Ok((pairs, singles))
}

/// Builds the pairing projection for `λ ∈ Λ_k(A)` from the eigensystem of
/// `A`. The recorded residual is evaluated against the spectral data.
pub fn pairing_projection(
    eig: &HermitianEigenSystem,
    k: usize,
    lambda: f64,
    phases: &[f64],
    pairing: Option<&[(usize, usize)]>,
) -> Result<CompressionProjection> {
    let params = pairing_params(eig, k, lambda, phases, pairing)?;
    let coeffs = params.coefficients(eig.dim());
    let frame = &eig.vectors * &coeffs;

    // C* diag(a) C − λI
    let kk = coeffs.cols();
    let mut m = ComplexMatrix::zeros(kk, kk);
    for p in 0..kk {
        for q in 0..kk {
            let mut acc = ZERO;
            for (l, &al) in eig.values.iter().enumerate() {
                acc += coeffs[(l, p)].conj() * coeffs[(l, q)] * al;
            }
            m[(p, q)] = acc;
        }
    }
    let residual = m.shift_diagonal(C64::new(-lambda, 0.0)).frobenius_norm();
    Ok(CompressionProjection::new(frame, C64::new(lambda, 0.0))?.with_residual(residual))
}
