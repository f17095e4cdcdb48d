//! Seeded random operators and states for tests and the CLI.
//!
//! States are drawn from the full-rank ensemble ρ = GG†/tr(GG†) with G a
//! matrix of standard complex Gaussians. The Gaussian comes from a hand-rolled
//! Box–Muller transform so that a given seed produces the same stream across
//! dependency versions.

use crate::linalg::{DensityOperator, Operator, Vector};
use crate::scalar::Scalar;
use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic generator for a seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; clamp u1 away from zero so the log stays finite.
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn standard_complex<T: Scalar, R: Rng>(rng: &mut R) -> Complex<T> {
    Complex::new(T::of(standard_normal(rng)), T::of(standard_normal(rng)))
}

/// Matrix with independent standard complex Gaussian entries.
pub fn random_operator<T: Scalar, R: Rng>(dim: usize, rng: &mut R) -> Operator<T> {
    Operator::from_fn(dim, |_, _| standard_complex(rng))
}

/// Full-rank random state GG†/tr(GG†).
pub fn random_state<T: Scalar, R: Rng>(dim: usize, rng: &mut R) -> DensityOperator<T> {
    let g = random_operator::<T, R>(dim, rng);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityOperator::new(m.scaled_re(T::one() / tr))
}

/// Haar-ish random unit vector (Gaussian direction).
pub fn random_unit_vector<T: Scalar, R: Rng>(dim: usize, rng: &mut R) -> Vector<T> {
    let v = Vector::from_entries((0..dim).map(|_| standard_complex(rng)).collect());
    v.normalized()
}
