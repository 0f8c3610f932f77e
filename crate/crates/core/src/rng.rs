//! Deterministic seed derivation for parallel restarts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Concrete generator used by every stochastic routine.
pub type Rng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a base seed with a path of stream identifiers
/// (witness id, grid index, restart index, ...).
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn rng_for(base: u64, path: &[u64]) -> Rng {
    Rng::seed_from_u64(derive_seed(base, path))
}
