//! Deterministic RNG stream derivation.
//!
//! Every random decision in the crate draws from a stream derived from the
//! master seed and a path of integer labels (round, client id, purpose tag).
//! Streams for distinct paths are statistically independent, and parallel
//! execution is bit-identical to sequential execution because each unit of
//! work derives its own stream instead of sharing one.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Purpose tags keeping streams for different uses of the same
/// (round, client) pair disjoint.
pub mod purpose {
    pub const UPDATE: u64 = 1;
    pub const DESIGN: u64 = 2;
    pub const DETECTION: u64 = 3;
    pub const CORPUS: u64 = 4;
    pub const PROMPTS: u64 = 5;
    pub const PARTICIPATION: u64 = 6;
    pub const TRIAL: u64 = 7;
}

/// SplitMix64 finalizer; the standard 64-bit mixing step.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hash a seed and a label path into a single stream id.
pub fn stream_id(master_seed: u64, path: &[u64]) -> u64 {
    let mut h = mix64(master_seed);
    for &label in path {
        h = mix64(h ^ label);
    }
    h
}

/// Derive an independent RNG for the given label path.
pub fn derive_rng(master_seed: u64, path: &[u64]) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(stream_id(master_seed, path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_path_same_stream() {
        let mut a = derive_rng(42, &[1, 2, 3]);
        let mut b = derive_rng(42, &[1, 2, 3]);
        for _ in 0..16 {
            assert_eq!(a.gen::<u64>(), b.gen::<u64>());
        }
    }

    #[test]
    fn distinct_paths_diverge() {
        let mut a = derive_rng(42, &[1, 2, 3]);
        let mut b = derive_rng(42, &[1, 2, 4]);
        let mut c = derive_rng(43, &[1, 2, 3]);
        let (xa, xb, xc) = (a.gen::<u64>(), b.gen::<u64>(), c.gen::<u64>());
        assert_ne!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn path_is_not_flattened() {
        // [1, 2] and [mix(1^2)] style collisions must not occur for the
        // empty-vs-zero label edge case.
        assert_ne!(stream_id(7, &[0]), stream_id(7, &[]));
        assert_ne!(stream_id(7, &[1, 0]), stream_id(7, &[1]));
    }
}
