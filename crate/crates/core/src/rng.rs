//! Deterministic per-replica random streams.
//!
//! Replica `r` of a run with master seed `s` draws from the ChaCha8 generator
//! keyed by `seed_from_u64(s)` with its 64-bit stream id set to `r`. Streams
//! of one key never overlap, and the same `(s, r)` pair always reproduces the
//! same sequence bit for bit, independently of thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSpec {
    pub master_seed: u64,
}

impl RngSpec {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    /// Generator for replica `replica`.
    pub fn stream(&self, replica: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(replica);
        rng
    }

    /// Child spec for an independent sub-experiment, e.g. one grid point of a
    /// sweep. Uses the SplitMix64 finalizer on `(master_seed, index)`.
    pub fn derive(&self, index: u64) -> RngSpec {
        let mut z = self
            .master_seed
            .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        RngSpec::new(z ^ (z >> 31))
    }
}
