//! Portable sampling on top of xoshiro256++: every draw goes through
//! `next_u64`, so sequences depend only on the seed.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub type Rng = Xoshiro256PlusPlus;

pub fn seeded(seed: u64) -> Rng {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Uniform draw from `0..bound` (`bound > 0`) by rejection.
pub fn below(rng: &mut Rng, bound: u64) -> u64 {
    let threshold = bound.wrapping_neg() % bound;
    loop {
        let x = rng.next_u64();
        if x >= threshold {
            return x % bound;
        }
    }
}

/// `k` distinct indices from `0..total`, sorted, via a partial Fisher-Yates.
pub fn sample(rng: &mut Rng, total: usize, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..total).collect();
    for i in 0..k {
        let j = i + below(rng, (total - i) as u64) as usize;
        idx.swap(i, j);
    }
    let mut chosen = idx[..k].to_vec();
    chosen.sort_unstable();
    chosen
}

pub fn shuffle<T>(rng: &mut Rng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = below(rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

pub fn coin(rng: &mut Rng) -> bool {
    rng.next_u64() >> 63 == 1
}
