//! Deterministic randomness plumbing.
//!
//! Every randomized routine in the crate draws from a ChaCha8 stream whose
//! seed is derived from a single master seed, a textual stream label, and an
//! optional item index:
//!
//! ```text
//! stream_seed(master, label)      = mix64(master XOR fnv1a64(label))
//! child_seed(stream, index)       = mix64(stream XOR mix64(index))
//! rng(child)                      = ChaCha8 seeded from child
//! ```
//!
//! `mix64` is the splitmix64 finalizer, a bijective avalanche permutation on
//! 64-bit words. Separating streams by label keeps independent experiments
//! decoupled (changing the sample count in one sweep never perturbs another),
//! and per-index children make parallel iteration order irrelevant: the i-th
//! item sees the same stream whether the loop runs serially or on a pool.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer: bijective 64-bit avalanche mix.
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// FNV-1a hash of a byte string (64-bit variant).
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xCBF2_9CE4_8422_2325u64;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Seed of the named stream under `master`.
pub fn stream_seed(master: u64, label: &str) -> u64 {
    mix64(master ^ fnv1a64(label.as_bytes()))
}

/// Seed of the `index`-th child of a stream.
pub fn child_seed(stream: u64, index: u64) -> u64 {
    mix64(stream ^ mix64(index))
}

/// ChaCha8 generator for the named stream.
pub fn stream_rng(master: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(master, label))
}

/// ChaCha8 generator for the `index`-th child of the named stream.
pub fn indexed_rng(master: u64, label: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(child_seed(stream_seed(master, label), index))
}
