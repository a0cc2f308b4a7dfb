//! Keyed random streams for reproducible Monte Carlo.
//!
//! Every trial draws from its own ChaCha stream selected by
//! `(master seed, trial, hypothesis)`, so results do not depend on the
//! order in which trials are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// ChaCha8 generator keyed by `seed`, positioned on stream `stream_id`.
pub fn stream(seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one simulated trial under one hypothesis.
pub fn trial_seed(master_seed: u64, trial: u64, alternative: bool) -> u64 {
    let h = splitmix64(master_seed);
    let h = splitmix64(h ^ trial);
    splitmix64(h ^ u64::from(alternative))
}
