//! Per-purpose seed derivation.
//!
//! A single pipeline seed fans out into independent generator streams so
//! that any command can be re-run on its own and parallel order never
//! changes results. The derivation is
//!
//! ```text
//! derive(seed, purpose, key) = splitmix64(seed ^ fnv1a(purpose) ^ splitmix64(fnv1a(key)))
//! ```
//!
//! Purposes used by the pipeline are listed in [`purpose`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags for [`derive`].
pub mod purpose {
    pub const SAMPLING: &str = "select-parses";
    pub const CLUSTER_INIT: &str = "cluster-init";
    pub const TRAIN_SAMPLE: &str = "train-sample";
    pub const MASK: &str = "mask";
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a sub-seed for `purpose`, keyed by e.g. a record id.
pub fn derive(seed: u64, purpose: &str, key: &str) -> u64 {
    splitmix64(seed ^ fnv1a(purpose.as_bytes()) ^ splitmix64(fnv1a(key.as_bytes())))
}

/// The generator used everywhere a seed is accepted.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
