//! Seed derivation.
//!
//! Every randomized output is driven by a single 64-bit seed. Independent
//! consumers (HIT builder, bad-reference spans, mock model logits, simulators)
//! get their own ChaCha stream derived from `(seed, label)`, so adding a new
//! consumer never perturbs the draws of an existing one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// 64-bit FNV-1a. Used only to turn labels into stream ids; stable across
/// platforms and toolchains, unlike `std::hash::DefaultHasher`.
pub fn stable_hash(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Generator for the sub-stream `label` of `seed`.
pub fn derive(seed: u64, label: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stable_hash(label.as_bytes()));
    rng
}
