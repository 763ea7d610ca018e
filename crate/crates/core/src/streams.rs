//! Seeded random substreams.
//!
//! Every random decision in a trial is drawn from a stream keyed by
//! `(seed, trial, purpose)`, so results do not depend on evaluation order
//! or worker count, and configurations evaluated with the same seed see
//! the same node fields and coin flips.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// What a stream is used for. The discriminant is part of the key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    PrimaryPoints = 1,
    SecondaryPoints = 2,
    PrimaryPairing = 3,
    SecondaryPairing = 4,
    Mac = 5,
    PrimaryRelay = 6,
    SecondaryRelay = 7,
    Packets = 8,
    Void = 9,
    Darts = 10,
    Aux = 11,
}

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn stream_key(seed: u64, trial: u64, purpose: Purpose) -> u64 {
    let a = splitmix64(seed);
    let b = splitmix64(a ^ trial.wrapping_mul(0xd6e8_feb8_6659_fd93));
    splitmix64(b ^ (purpose as u64).wrapping_mul(0xa076_1d64_78bd_642f))
}

/// Stream for one `(seed, trial, purpose)` triple.
pub fn stream(seed: u64, trial: u64, purpose: Purpose) -> SimRng {
    SimRng::seed_from_u64(stream_key(seed, trial, purpose))
}

/// Per-item substream, e.g. one per node for relay choices.
pub fn item_stream(seed: u64, trial: u64, purpose: Purpose, item: u64) -> SimRng {
    let mut rng = stream(seed, trial, purpose);
    rng.set_stream(item);
    rng
}
