//! Random graph ensembles and the motif-doubling / rewiring constructions.
//!
//! Every generator takes an explicit [`RngSeed`]; the same seed and parameters
//! always produce the same graph.

mod motif;
mod regular;
mod rewire;
mod sbm;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use motif::{attach_motif_pair, MotifSpec};
pub use regular::{regular_graph, regular_sbm};
pub use rewire::{rewire_increase_triangles, RewireOutcome};
pub use sbm::{sbm_sample, SbmParams};

/// Seed for a generator call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent child seed for sub-step `stream`.
    pub fn child(self, stream: u64) -> RngSeed {
        // splitmix64 finaliser over the pair
        let mut z = self
            .0
            .wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        RngSeed(z ^ (z >> 31))
    }
}

impl From<u64> for RngSeed {
    fn from(v: u64) -> Self {
        RngSeed(v)
    }
}
