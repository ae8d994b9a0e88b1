//! Seeded random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent ChaCha stream for work item `(major, minor)` under `seed`.
/// Results depend only on the triple, never on scheduling.
pub fn substream(seed: u64, major: u64, minor: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(major << 32 | (minor & 0xffff_ffff));
    rng
}

/// Random seed for runs that were not given one.
pub fn fresh_seed() -> u64 {
    rand::random()
}
