//! Per-trial random streams.
//!
//! Every Monte-Carlo trial seeds its own generator from
//! `(seed, image_id, trial)`, so a score never depends on the order in which
//! images or trials are evaluated.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xCBF2_9CE4_8422_2325u64, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01B3)
    })
}

/// Stable 64-bit seed for one trial of one image in one sampling domain.
pub fn stream_seed(seed: u64, domain: &str, image_id: &str, trial: u64) -> u64 {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ fnv1a(domain.as_bytes()));
    h = splitmix64(h ^ fnv1a(image_id.as_bytes()));
    splitmix64(h ^ trial)
}

pub fn trial_rng(seed: u64, domain: &str, image_id: &str, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(seed, domain, image_id, trial))
}
