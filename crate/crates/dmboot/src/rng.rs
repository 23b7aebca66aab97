//! Deterministic random-number streams.
//!
//! All randomized routines take a 64-bit seed and derive independent
//! substreams from it, so results are bit-reproducible for a given seed and
//! do not depend on thread scheduling. Two mechanisms are combined:
//!
//! - [`stream_rng`] keys a ChaCha12 generator on the seed and selects one of
//!   2^64 independent streams (used for "index within one purpose", e.g. the
//!   m-th multiplier replicate).
//! - [`derive_seed`] mixes a `(tag, index)` pair into a fresh seed via a
//!   SplitMix64-style finalizer (used to give each purpose its own seed
//!   namespace, e.g. per-replication data generation vs. bootstrap draws).

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Purpose tags for [`derive_seed`]. Each consumer of randomness inside the
/// Monte Carlo drivers gets its own namespace.
pub mod tags {
    /// Data generation for one Monte Carlo replication.
    pub const DGP: u64 = 0x01;
    /// Bootstrap multiplier draws for one Monte Carlo replication.
    pub const BOOTSTRAP: u64 = 0x02;
    /// The large reference sample used to pin the estimand.
    pub const THETA: u64 = 0x03;
    /// One row (configuration) of a simulation table.
    pub const SIM_ROW: u64 = 0x04;
}

/// ChaCha12 generator keyed on `seed`, positioned on substream `stream`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives a fresh seed for `(tag, index)` under a master seed.
pub fn derive_seed(seed: u64, tag: u64, index: u64) -> u64 {
    let mut z = seed
        ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
