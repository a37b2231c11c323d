#![allow(dead_code)]

use hrnr::linalg::haar_isometry;
use hrnr::{ComplexMatrix, C64};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    haar_isometry(n, n, rng.next_u64()).unwrap()
}

/// `Q diag(values) Q*` for a Haar `Q`.
pub fn with_spectrum(rng: &mut ChaCha8Rng, values: &[C64]) -> ComplexMatrix {
    let q = unitary(rng, values.len());
    &(&q * &ComplexMatrix::diag(values)) * &q.adjoint()
}

/// Hermitian matrix with the given real spectrum.
pub fn hermitian_with(rng: &mut ChaCha8Rng, values: &[f64]) -> ComplexMatrix {
    let z: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
    with_spectrum(rng, &z).hermitian_part()
}

pub fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..=hi)
}

pub fn random_complex(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    C64::new(uniform(rng, -radius, radius), uniform(rng, -radius, radius))
}

/// Real spectrum with occasional repeated values.
pub fn random_spectrum(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    if rng.random_bool(0.25) {
        (0..n).map(|_| rng.random_range(-2..=2) as f64).collect()
    } else {
        (0..n).map(|_| uniform(rng, -3.0, 3.0)).collect()
    }
}
