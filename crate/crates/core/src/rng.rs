//! Seed splitting: one 64-bit seed, one ChaCha8 stream per task.
//!
//! The seed keys the generator. The 64-bit stream id holds the purpose in
//! its top 16 bits and a task index in the low 48, so draws for different
//! purposes or indices never overlap and do not depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Consumers of randomness, each owning a disjoint range of stream ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u16)]
pub enum Purpose {
    /// Bits and noise of OFDM frame `i`.
    OfdmFrame = 0,
    /// Noise of a standalone channel application.
    ChannelNoise = 1,
    /// Coefficients of a synthetic in-span test signal.
    SpanSignal = 2,
    /// Perturbation of regularisation data.
    DataPerturbation = 3,
}

const INDEX_BITS: u32 = 48;

/// Generator for task `index` of `purpose` in a run seeded with `seed`.
pub fn stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    assert!(index < 1 << INDEX_BITS, "task index {index} exceeds 48 bits");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << INDEX_BITS) | index);
    rng
}
