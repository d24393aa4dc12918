//! Seeded randomness.
//!
//! Every random procedure draws from ChaCha8 seeded with
//! `ChaCha8Rng::seed_from_u64(seed)`. Independent work items (one bootstrap
//! resample, one reshuffle split) each get their own stream, selected with
//! `set_stream(index)`, so a result never depends on how items are scheduled
//! across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use rand_chacha::ChaCha8Rng as Generator;

/// Generator for work item `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
