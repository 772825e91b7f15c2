use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::FeatureMatrix;
use crate::linalg::{dot, norm};

/// Factor applied to the power-iteration estimate before it enters `L`.
/// Power iteration approaches `λ_max` from below.
pub const SPECTRAL_INFLATION: f64 = 1.01;

const TOLERANCE: f64 = 1e-6;
const MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    /// Rayleigh-quotient estimate of `λ_max(AᵀA)`.
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl SpectralEstimate {
    /// Inflated estimate used wherever an upper bound is required.
    pub fn upper(&self) -> f64 {
        self.value * SPECTRAL_INFLATION
    }
}

/// Estimates `λ_max(AᵀA)` by power iteration with `A` and `Aᵀ` products.
///
/// Stops when `‖AᵀA v - λ v‖ <= 1e-6 λ` or after 10⁴ iterations.
pub fn spectral_norm(a: &FeatureMatrix) -> SpectralEstimate {
    let n = a.cols();
    if n == 0 || a.rows() == 0 {
        return SpectralEstimate { value: 0.0, converged: true, iterations: 0 };
    }
    // fixed positive start vector, deterministic across runs
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
    let scale = norm(&v);
    v.iter_mut().for_each(|x| *x /= scale);

    let mut av = vec![0.0; a.rows()];
    let mut w = vec![0.0; n];
    let mut lambda = 0.0;
    for it in 1..=MAX_ITERATIONS {
        a.matvec(&v, &mut av);
        a.matvec_t(&av, &mut w);
        lambda = dot(&v, &w);
        let w_norm = norm(&w);
        if w_norm == 0.0 {
            return SpectralEstimate { value: 0.0, converged: true, iterations: it };
        }
        let residual = w.iter().zip(&v).map(|(wi, vi)| (wi - lambda * vi).powi(2)).sum::<f64>().sqrt();
        if residual <= TOLERANCE * lambda {
            return SpectralEstimate { value: lambda, converged: true, iterations: it };
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / w_norm;
        }
    }
    SpectralEstimate { value: lambda, converged: false, iterations: MAX_ITERATIONS }
}
