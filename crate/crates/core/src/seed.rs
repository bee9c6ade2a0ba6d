//! Seed derivation shared by every experiment.
//!
//! A trial's seed is `splitmix64(master ^ splitmix64(index + GOLDEN))`, and a
//! generator is a ChaCha20 stream whose 32-byte key is four consecutive
//! SplitMix64 outputs of that seed, written little-endian. Both steps are
//! fixed so transcripts can be reproduced by ports in other languages.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stream generator used for every sampling decision.
pub type StreamRng = ChaCha20Rng;

/// One SplitMix64 finalization step.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `index` under `master`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(GOLDEN)))
}

/// Derives an independent sub-seed (e.g. the adversary's own generator) from a seed.
pub fn sub_seed(seed: u64, lane: u64) -> u64 {
    splitmix64(seed ^ splitmix64(lane.wrapping_mul(GOLDEN) ^ 0xD1B5_4A32_D192_ED03))
}

/// ChaCha20 generator keyed from `seed`.
pub fn stream_rng(seed: u64) -> StreamRng {
    let mut key = [0u8; 32];
    for (j, chunk) in key.chunks_exact_mut(8).enumerate() {
        let word = splitmix64(seed.wrapping_add(GOLDEN.wrapping_mul(j as u64)));
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha20Rng::from_seed(key)
}
