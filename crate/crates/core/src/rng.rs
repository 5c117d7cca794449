//! Counter-based random streams.
//!
//! Every randomized task (a bootstrap resample, a convergence trial) draws
//! from its own ChaCha stream keyed by `(seed, stream)`, so results do not
//! depend on how tasks are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
