//! Reproducible random streams.
//!
//! Every stream is a ChaCha8 generator keyed by a master seed and positioned
//! on its own 64-bit stream id, so realization `i` draws the same numbers no
//! matter which worker runs it or in what order. Nested experiments derive
//! child seeds with [`SeedSpec::child`].

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// A master seed together with the index of one stream under it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self { master_seed, stream_index }
    }

    /// Opens the stream identified by this spec.
    pub fn stream(&self) -> Stream {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        Stream { rng }
    }

    /// Seed for an independent family of streams nested under this one.
    pub fn child(&self, index: u64) -> SeedSpec {
        let key = splitmix64(self.master_seed ^ splitmix64(self.stream_index.wrapping_add(0x5851_F42D_4C95_7F2D)));
        SeedSpec { master_seed: key, stream_index: index }
    }
}

/// Stream `index` nested under `master`.
pub fn substream(master: &SeedSpec, index: u64) -> Stream {
    master.child(index).stream()
}

/// Draws a seed from operating-system entropy.
pub fn entropy_seed() -> u64 {
    rand::random()
}

/// A deterministic random stream.
#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform variate on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }

    /// Uniform variate on `[low, high)`.
    pub fn uniform_range(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.uniform()
    }

    /// Seeds a fresh family of streams from this one.
    pub fn split(&mut self) -> SeedSpec {
        SeedSpec::new(self.rng.next_u64(), 0)
    }

    /// `count` i.i.d. normal samples.
    pub fn gaussian(&mut self, mean: f64, std_dev: f64, count: usize) -> Result<Vec<f64>> {
        if !(std_dev > 0.0) || !std_dev.is_finite() || !mean.is_finite() {
            return Err(Error::Parameter(format!(
                "normal distribution needs finite mean and std_dev > 0 (got mean {mean}, std_dev {std_dev})"
            )));
        }
        Ok((0..count).map(|_| mean + std_dev * self.standard_normal()).collect())
    }
}

impl RngCore for Stream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
