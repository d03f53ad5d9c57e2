//! Keyed green-list vocabulary partition.
//!
//! The green list for a context token is a deterministic function of the
//! secret key and the context: a keyed 64-bit mix seeds a partial shuffle of
//! the vocabulary, and the first round(gamma * V) positions are green. The
//! partition is reproducible bit-exactly across calls and processes.

use serde::{Deserialize, Serialize};

use crate::rng::mix64;

fn default_gamma_green() -> f64 {
    0.25
}

fn default_delta_boost() -> f64 {
    3.0
}

/// Watermark key: secret, green fraction gamma, and logit boost delta.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GreenListKey {
    pub secret: u64,
    #[serde(default = "default_gamma_green")]
    pub gamma_green: f64,
    #[serde(default = "default_delta_boost")]
    pub delta_boost: f64,
}

impl GreenListKey {
    pub fn new(secret: u64) -> Self {
        GreenListKey {
            secret,
            gamma_green: default_gamma_green(),
            delta_boost: default_delta_boost(),
        }
    }

    /// Green-list size for a vocabulary of `v` tokens: round(gamma * V).
    pub fn list_size(&self, v: usize) -> usize {
        (self.gamma_green * v as f64).round() as usize
    }
}

/// Deterministic green list for one context token, as a sorted id vector.
///
/// Hashing window is one token: the partition depends only on (secret,
/// context).
pub fn green_list(key: &GreenListKey, vocab_size: usize, context: u32) -> Vec<u32> {
    let size = key.list_size(vocab_size);
    let mut perm: Vec<u32> = (0..vocab_size as u32).collect();
    // Keyed partial Fisher-Yates; the mix chain plays the role of the PRF.
    let mut state = mix64(key.secret ^ mix64(context as u64 ^ 0x6772_6565_6e5f_6c73));
    for i in 0..size {
        state = mix64(state);
        let j = i + (state as usize) % (vocab_size - i);
        perm.swap(i, j);
    }
    let mut greens = perm[..size].to_vec();
    greens.sort_unstable();
    greens
}

/// Boolean membership mask over the vocabulary; convenience form of
/// [`green_list`] for scoring loops.
pub fn green_mask(key: &GreenListKey, vocab_size: usize, context: u32) -> Vec<bool> {
    let mut mask = vec![false; vocab_size];
    for g in green_list(key, vocab_size, context) {
        mask[g as usize] = true;
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_across_calls() {
        let key = GreenListKey::new(1234);
        for ctx in 0..64u32 {
            assert_eq!(green_list(&key, 64, ctx), green_list(&key, 64, ctx));
        }
    }

    #[test]
    fn list_size_is_round_gamma_v() {
        let key = GreenListKey::new(99);
        for ctx in 0..64u32 {
            assert_eq!(green_list(&key, 64, ctx).len(), 16);
        }
        let mut k2 = key;
        k2.gamma_green = 0.5;
        assert_eq!(green_list(&k2, 10, 0).len(), 5);
    }

    #[test]
    fn different_secrets_give_different_partitions() {
        // Exhaustive over all 64 contexts: the two keys must disagree
        // somewhere; assert Jaccard < 1 over the union of contexts.
        let a = GreenListKey::new(1234);
        let b = GreenListKey::new(2345);
        let mut intersection = 0usize;
        let mut union = 0usize;
        for ctx in 0..64u32 {
            let ga = green_list(&a, 64, ctx);
            let gb = green_list(&b, 64, ctx);
            let sa: std::collections::BTreeSet<u32> = ga.into_iter().collect();
            let sb: std::collections::BTreeSet<u32> = gb.into_iter().collect();
            intersection += sa.intersection(&sb).count();
            union += sa.union(&sb).count();
        }
        assert!(intersection < union, "identical partitions for both secrets");
    }

    #[test]
    fn mask_matches_list() {
        let key = GreenListKey::new(7);
        let mask = green_mask(&key, 64, 5);
        let list = green_list(&key, 64, 5);
        for (i, &m) in mask.iter().enumerate() {
            assert_eq!(m, list.contains(&(i as u32)));
        }
    }
}
