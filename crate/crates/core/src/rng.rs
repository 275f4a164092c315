//! Seeded, stream-addressable random number generation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout: ChaCha8 keyed by `seed`, with `stream`
/// selecting an independent substream (one per replication).
pub type FsRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> FsRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
