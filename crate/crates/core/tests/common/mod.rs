#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsablate::nnkernel::Tensor2;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rows: usize, cols: usize, scale: f64, rng: &mut impl Rng) -> Tensor2 {
    Tensor2::from_fn(rows, cols, |_, _| rng.random_range(-scale..scale))
}

pub fn windows(count: usize, rows: usize, cols: usize, rng: &mut impl Rng) -> Vec<Tensor2> {
    (0..count).map(|_| uniform(rows, cols, 2.0, rng)).collect()
}

/// `T x C` matrix of noisy sinusoids with distinct phases per channel.
pub fn sine_series(len: usize, channels: usize, period: f64, noise: f64, seed: u64) -> Tensor2 {
    let mut r = rng(seed);
    Tensor2::from_fn(len, channels, |t, c| {
        let phase = c as f64 * 0.7;
        (2.0 * std::f64::consts::PI * t as f64 / period + phase).sin()
            + noise * r.random_range(-1.0..1.0)
    })
}
