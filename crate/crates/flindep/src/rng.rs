//! Deterministic random-number substreams.
//!
//! Every randomized routine in this crate draws from a stream identified by
//! a `(seed, index)` pair rather than from shared mutable RNG state. Replicate
//! `l` of a bootstrap always sees the same stream no matter which worker thread
//! executes it or in what order, which is what makes results independent of
//! thread count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG for substream `index` under `seed`.
///
/// Uses the ChaCha stream counter, so distinct indices yield independent
/// streams under the same key.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derive a child seed for a labeled nested scope (e.g. dataset `i` of a
/// scenario, then method `j` within that dataset).
///
/// SplitMix64 finalizer chain; stateless, so the derivation is reproducible
/// from the labels alone.
pub fn child_seed(seed: u64, labels: &[u64]) -> u64 {
    let mut state = seed;
    for &label in labels {
        state = mix(state ^ mix(label.wrapping_add(0x9E37_79B9_7F4A_7C15)));
    }
    state
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
