//! Keyed ChaCha substreams. Every random stream in the crate is a pure
//! function of `(master seed, index, stream id)`, so results do not depend on
//! how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream identifiers within one environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Arrivals = 0,
    Points = 1,
    Signs = 2,
    Tail = 3,
    /// Anything not tied to a series environment (CMS draws, bootstrap).
    Auxiliary = 4,
}

const DOMAIN_TAG: u64 = 0x6d75_6c74_6973_7462; // "multistb"

/// Generator for `stream` of environment `index` under `seed`.
pub fn substream(seed: u64, index: u64, stream: Stream) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    key[16..24].copy_from_slice(&DOMAIN_TAG.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream as u64);
    rng
}

/// SplitMix64 finalizer, used to derive per-experiment seeds from a master
/// seed and a label.
pub fn mix(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
