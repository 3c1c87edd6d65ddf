//! Reproducible Gaussian streams.
//!
//! Each stream is a ChaCha8 generator keyed by `seed` with its 64-bit stream
//! selector set to `stream_id`; distinct ids give non-overlapping keystreams.
//! Normals are drawn with the ziggurat sampler of `rand_distr`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha8Rng,
}

impl NormalStream {
    #[inline]
    pub fn next_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }
}

impl Iterator for NormalStream {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        Some(self.next_normal())
    }
}

/// Stream of standard normal variates identified by `(seed, stream_id)`.
pub fn rng_stream(seed: u64, stream_id: u64) -> NormalStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    NormalStream { rng }
}
