//! Shared inputs for the benchmarks.

use interchange::io::{generate, RandomModel};
use interchange::CspInstance;

/// A seeded binary instance.
pub fn instance(n: usize, d: usize, density: f64, tightness: f64, seed: u64) -> CspInstance {
    generate(&RandomModel::new(n, d, density, tightness, seed)).expect("valid model")
}
