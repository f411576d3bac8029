#![allow(dead_code)]

use bubbleforge::Dim;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dim(n: usize) -> Dim {
    Dim::new(n).unwrap()
}

/// Uniform point in the cube `[-s, s]^n`.
pub fn point(rng: &mut ChaCha8Rng, n: usize, s: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-s..s)).collect()
}

/// Uniform point in the ball `B(0, r)`.
pub fn in_ball(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<f64> {
    loop {
        let x = point(rng, n, 1.0);
        if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            return x.into_iter().map(|v| v * r).collect();
        }
    }
}

/// `10^u` with `u` uniform in `[lo, hi]`.
pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.random_range(lo..hi))
}

pub fn unit(n: usize, axis: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[axis] = 1.0;
    e
}

pub fn scaled(x: &[f64], s: f64) -> Vec<f64> {
    x.iter().map(|v| v * s).collect()
}

/// Uniform random unit vector.
pub fn direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let x = point(rng, n, 1.0);
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r > 1e-3 && r <= 1.0 {
            return scaled(&x, 1.0 / r);
        }
    }
}
