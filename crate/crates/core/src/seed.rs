//! Seed expansion. Every random choice in the crate starts from one base
//! seed; independent streams are derived from it by index.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default base seed for the command-line tools.
pub const DEFAULT_SEED: u64 = 20210604;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

impl Default for Seed {
    fn default() -> Self {
        Seed(DEFAULT_SEED)
    }
}

impl Seed {
    /// Seed of the `index`-th child stream. Children of distinct indices
    /// (and of distinct parents) are decorrelated by a SplitMix64 finalizer.
    pub fn derive(self, index: u64) -> Seed {
        let mut z = self
            .0
            .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Seed(z ^ (z >> 31))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}
