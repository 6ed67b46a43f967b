//! Seeded random streams.
//!
//! Every stochastic component takes a [`ChaCha8Rng`] so results depend only
//! on the seed, never on the platform's default generator. Independent
//! sub-tasks (records, rounds) get their own stream via [`stream`].

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// A generator for `seed`, stream 0.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A generator for `seed` on an independent stream `index`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
