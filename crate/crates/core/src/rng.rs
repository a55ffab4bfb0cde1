//! Seeded, reproducible random streams.
//!
//! Every randomized step draws from a ChaCha stream keyed by the run seed and
//! a named sub-stream, so one seed reproduces a whole pipeline and unrelated
//! steps never share random words.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// The generator for sub-stream `(name, index)` of `seed`.
pub fn stream(seed: u64, name: &str, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(splitmix64(fnv1a(name) ^ splitmix64(index)));
    rng
}

/// Derives a child seed; used where an API takes a plain `u64` seed.
pub fn derive_seed(seed: u64, name: &str, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(fnv1a(name).wrapping_add(index)))
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
