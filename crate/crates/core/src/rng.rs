//! Seeded, splittable randomness.
//!
//! A [`RngStream`] is identified by a `(master seed, stream index)` pair and
//! produces the same entry sequence on every run. Independent trials (or
//! concurrent workers) take distinct stream indices off one master seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};
use crate::matrix::Matrix;

/// Counter-based random stream: ChaCha12 keyed by the master seed, with the
/// stream index selecting an independent substream.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> RngStream {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Fresh stream with the same master seed and another index.
    pub fn substream(&self, stream: u64) -> RngStream {
        RngStream::new(self.seed, stream)
    }

    /// One standard normal draw.
    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Uniform draw from `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    /// Uniform integer from `[0, upper)`.
    pub fn index(&mut self, upper: usize) -> usize {
        self.rng.random_range(0..upper)
    }
}

/// `m x n` matrix of i.i.d. standard normal entries, filled column by column.
pub fn gaussian_matrix(rng: &mut RngStream, m: usize, n: usize) -> Result<Matrix> {
    if m == 0 || n == 0 {
        return Err(invalid("gaussian_matrix: dimensions must be positive"));
    }
    let mut data = Vec::with_capacity(m * n);
    for _ in 0..m * n {
        data.push(rng.normal());
    }
    Ok(Matrix::from_raw(m, n, data))
}
