//! Reproducible Gaussian increments keyed by `(seed, path, step)`.
//!
//! A ChaCha8 stream is seeded from `seed` and selects `path` as its stream
//! id. Each step consumes a fixed block of 32-bit words (four per
//! Box–Muller pair), so step `k` always starts at word `k · block`; any
//! step of any path can be regenerated without replaying the others.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS_PER_PAIR: u128 = 4;

pub struct GaussianStream {
    rng: ChaCha8Rng,
    dim: usize,
    next_step: u64,
}

impl GaussianStream {
    /// Stream of standard normal `dim`-vectors for one path.
    pub fn new(seed: u64, path: u64, dim: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(path);
        GaussianStream { rng, dim, next_step: 0 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn block_words(&self) -> u128 {
        self.dim.div_ceil(2) as u128 * WORDS_PER_PAIR
    }

    /// Writes the draw for `step` into `out`.
    pub fn fill_step(&mut self, step: u64, out: &mut [f64]) {
        if step != self.next_step {
            self.rng.set_word_pos(step as u128 * self.block_words());
        }
        self.fill_next(out);
        self.next_step = step + 1;
    }

    /// Writes the next step's draw into `out`.
    pub fn fill_next(&mut self, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        let mut chunks = out.chunks_mut(2);
        for pair in &mut chunks {
            let (a, b) = box_muller(&mut self.rng);
            pair[0] = a;
            if pair.len() == 2 {
                pair[1] = b;
            }
        }
        self.next_step += 1;
    }
}

fn box_muller(rng: &mut ChaCha8Rng) -> (f64, f64) {
    // u1 ∈ (0,1] keeps the logarithm finite
    let u1 = ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
    let u2 = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    (r * c, r * s)
}
