//! Seed derivation for reproducible, order-independent Monte Carlo runs.
//!
//! Iteration `i` of an experiment with master seed `m` draws from ChaCha8
//! keyed by `m` on stream `i`. Streams are independent, so iterations can be
//! evaluated in any order or on any number of workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Random stream type used throughout the crate.
pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// A single stream for ad-hoc use.
    pub fn rng(self) -> SimRng {
        SimRng::seed_from_u64(self.0)
    }

    /// The private stream for Monte Carlo iteration `index`.
    pub fn iteration_rng(self, index: u64) -> SimRng {
        let mut rng = SimRng::seed_from_u64(self.0);
        rng.set_stream(index);
        rng
    }
}

impl From<u64> for RngSeed {
    fn from(v: u64) -> Self {
        RngSeed(v)
    }
}
