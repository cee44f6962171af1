//! Random case generators and independent oracles shared by the test suites.
//!
//! Nothing here calls the evaluation code under test: generators emit case
//! text, and oracles recompute expected values from first principles.

pub mod confluence;
pub mod joint;
pub mod rules;
pub mod small;
pub mod trees;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shortest decimal that parses back to `x`.
pub(crate) fn num(x: f64) -> String {
    format!("{x}")
}
