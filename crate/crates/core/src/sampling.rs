//! Seeded samplers used by the randomized checks.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

pub use rand::SeedableRng;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic sub-seed for an independent stream.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gaussian_vector<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

pub fn unit_vector<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    loop {
        let v = gaussian_vector(rng, n);
        let norm = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}

/// Uniform point of the open unit ball in `R^n`.
pub fn ball_point<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    let r: f64 = rng.random::<f64>().powf(1.0 / n as f64);
    unit_vector(rng, n) * r
}

/// Flat Dirichlet weights (uniform on the open simplex).
pub fn dirichlet<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    let v = DVector::from_fn(n, |_, _| {
        let e: f64 = Exp1.sample(rng);
        e.max(1e-300)
    });
    let s = v.sum();
    v / s
}
