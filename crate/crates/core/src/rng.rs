// Copyright 2026 The MEQC Lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Counter-based random streams.
//!
//! Every random quantity is drawn from its own stream keyed by
//! `(seed, entity, tag)`, so adding users or servers never shifts the draws
//! of existing ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Field tags for stream derivation. Values are part of the reproducibility
/// contract and must not be renumbered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Tag {
    LocalCpu = 1,
    TxPower = 2,
    ChannelGain = 3,
    EdgeCpu = 4,
    Task = 5,
    PhysicalQubits = 6,
    Level = 7,
    Policy = 8,
    AgentInit = 9,
    AgentSample = 10,
    Shuffle = 11,
    Redraw = 12,
    Sweep = 13,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes an arbitrary list of words into one 64-bit key.
pub fn mix(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(0x6a09_e667_f3bc_c908, |acc, &w| splitmix64(acc ^ splitmix64(w)))
}

pub fn stream(seed: u64, entity: u64, tag: Tag) -> StreamRng {
    StreamRng::seed_from_u64(mix(&[seed, entity, tag as u64]))
}

/// Stream keyed by more than one index (e.g. user × server, or user × slot).
pub fn stream2(seed: u64, entity: u64, sub: u64, tag: Tag) -> StreamRng {
    StreamRng::seed_from_u64(mix(&[seed, entity, sub, tag as u64]))
}
