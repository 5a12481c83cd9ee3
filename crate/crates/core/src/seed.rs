//! Seed derivation. Every random consumer draws from a ChaCha stream keyed by
//! a root seed and addressed by a stream id, so results never depend on the
//! order in which independent consumers run.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids at or above this value are reserved for non-query consumers.
pub(crate) const RESERVED: u64 = 1 << 63;
pub(crate) const STREAM_GROUND_TRUTH: u64 = RESERVED;
pub(crate) const STREAM_PLAYER: u64 = RESERVED + 1;
pub(crate) const STREAM_SPLIT: u64 = RESERVED + 2;
pub(crate) const STREAM_SEARCH: u64 = RESERVED + 3;

/// A fresh generator on `stream` of the key derived from `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Child seed number `index` of `seed`, e.g. one per trial.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(RESERVED.wrapping_add(0x1000).wrapping_add(index));
    rng.next_u64()
}
