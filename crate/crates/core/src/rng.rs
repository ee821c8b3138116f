//! Deterministic random streams, derived from `(base_seed, deployment_index)`.
//!
//! Each concern draws from its own ChaCha stream so that, for example, the
//! ON/OFF trace of a deployment does not depend on how many numbers the
//! topology generator consumed, nor on which policy is being simulated.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Topology = 1,
    Flows = 2,
    Activity = 3,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one deployment; reported in outputs.
pub fn deployment_seed(base_seed: u64, index: usize) -> u64 {
    splitmix64(base_seed ^ splitmix64(index as u64))
}

pub fn stream_rng(base_seed: u64, index: usize, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(deployment_seed(base_seed, index));
    rng.set_stream(stream as u64);
    rng
}
