//! Seeded test data.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// I.i.d. standard normal entries scaled to unit `ℓ2` norm.
pub fn unit_coefficients(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    let mut c: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
    let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        c.iter_mut().for_each(|v| *v /= norm);
    }
    c
}

/// Complex version of [`unit_coefficients`].
pub fn unit_complex(n: usize, seed: u64) -> Vec<Complex64> {
    let mut r = rng(seed);
    let mut c: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(StandardNormal.sample(&mut r), StandardNormal.sample(&mut r)))
        .collect();
    let norm = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        c.iter_mut().for_each(|v| *v /= norm);
    }
    c
}
