//! Reproducible seeded random streams.
//!
//! A `SeededStream` names one substream of a master seed; the pair maps to a
//! ChaCha12 generator through a SplitMix64-style mix, so distinct trials get
//! statistically independent generators and the same `(seed, stream)` pair
//! reproduces the same draws bit for bit on a given platform. Gaussian
//! variates come from `rand_distr::StandardNormal` (ziggurat); the generator
//! and sampler choices are fixed and pinned in the crate manifest.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with a stream index into one 64-bit value.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut state = seed ^ 0x6A09_E667_F3BC_C909u64.wrapping_mul(stream.wrapping_add(1));
    let a = splitmix64(&mut state);
    let b = splitmix64(&mut state);
    a ^ b.rotate_left(32)
}

/// One named substream of a master seed (stream id = trial index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeededStream {
    pub seed: u64,
    pub stream: u64,
}

impl SeededStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// The substream with the same master seed and a different stream id.
    pub fn substream(&self, stream: u64) -> Self {
        Self {
            seed: mix_seed(self.seed, self.stream),
            stream,
        }
    }

    pub fn rng(&self) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(mix_seed(self.seed, self.stream))
    }
}
