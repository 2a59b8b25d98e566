//! Seed derivation. Every random draw in a run comes from a ChaCha stream
//! keyed by the run seed plus a fixed tuple of coordinates, so two code paths
//! that ask for the same coordinates see the same numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream purposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Sampling = 1,
    Estimation = 2,
    Learner = 3,
    Subset = 4,
    Repeat = 5,
    Calibration = 6,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a seed with a list of coordinates into a new 64-bit seed.
pub fn derive_seed(seed: u64, purpose: Purpose, coords: &[u64]) -> u64 {
    let mut h = splitmix(seed ^ (purpose as u64).rotate_left(32));
    for &c in coords {
        h = splitmix(h ^ c);
    }
    h
}

pub fn stream(seed: u64, purpose: Purpose, coords: &[u64]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, purpose, coords))
}
