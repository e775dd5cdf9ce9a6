//! Seeded permutation used by splitting and merging.
//!
//! Algorithm `shuffle-v1`, fixed so other implementations can reproduce it:
//!
//! 1. Key a ChaCha20 stream cipher RNG from the 64-bit seed with
//!    `rand_core`'s `seed_from_u64` (PCG32 expansion of the seed into the
//!    32-byte key, stream 0).
//! 2. Fisher–Yates from the back: for `i` in `n-1` down to `1`, draw `j`
//!    uniformly from `0..=i` and swap positions `i` and `j`.
//! 3. Each draw takes 64-bit outputs `x` and keeps the high word of
//!    `x * (i + 1)` (a 128-bit product), rejecting `x` when the low word is
//!    below `2^64 mod (i + 1)`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub const SHUFFLE_ALGORITHM: &str = "shuffle-v1/chacha20";

pub fn rng_from_seed(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Unbiased integer in `0..bound`. `bound` must be non-zero.
pub fn below<R: RngCore>(rng: &mut R, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let threshold = bound.wrapping_neg() % bound;
    loop {
        let m = u128::from(rng.next_u64()) * u128::from(bound);
        if (m as u64) >= threshold {
            return (m >> 64) as u64;
        }
    }
}

pub fn shuffle_with<T, R: RngCore>(items: &mut [T], rng: &mut R) {
    for i in (1..items.len()).rev() {
        let j = below(rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

pub fn shuffle<T>(items: &mut [T], seed: u64) {
    shuffle_with(items, &mut rng_from_seed(seed));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn is_a_permutation_and_deterministic() {
        let mut a: Vec<u32> = (0..100).collect();
        let mut b = a.clone();
        shuffle(&mut a, 7);
        shuffle(&mut b, 7);
        assert_eq!(a, b);
        assert_ne!(a, (0..100).collect::<Vec<_>>());
        let mut sorted = a.clone();
        sorted.sort();
        assert_eq!(sorted, (0..100).collect::<Vec<_>>());
        let mut c: Vec<u32> = (0..100).collect();
        shuffle(&mut c, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn small_inputs() {
        let mut empty: [u8; 0] = [];
        shuffle(&mut empty, 1);
        let mut one = [5];
        shuffle(&mut one, 1);
        assert_eq!(one, [5]);
    }

    #[test]
    fn draws_are_roughly_uniform() {
        let mut rng = rng_from_seed(3);
        let mut counts = [0u32; 3];
        for _ in 0..30_000 {
            counts[below(&mut rng, 3) as usize] += 1;
        }
        for c in counts {
            assert!((9_000..11_000).contains(&c), "{counts:?}");
        }
    }
}
