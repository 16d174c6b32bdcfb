//! Reproducible random streams.
//!
//! A stream is ChaCha8 keyed by the seed with the stream id selecting one
//! of 2⁶⁴ independent counter sequences, so `(seed, stream_id)` fixes the
//! output on every platform.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone)]
pub struct Stream {
    inner: ChaCha8Rng,
}

pub fn rng_stream(seed: u64, stream_id: u64) -> Stream {
    let mut inner = ChaCha8Rng::seed_from_u64(seed);
    inner.set_stream(stream_id);
    Stream { inner }
}

impl Stream {
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on the open interval `(0, 1)`: the midpoints of a 2⁻⁵³ grid.
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}
