//! The 64-bit mixing hash behind fingerprint identifiers.
//!
//! `mix64(x)` is one splitmix64 step from state `x`: add the golden gamma
//! `0x9e3779b97f4a7c15`, then xor-shift-multiply by `0xbf58476d1ce4e5b9`
//! and `0x94d049bb133111eb` (shifts 30, 27, 31). `hash_sequence` starts at
//! `0x243f6a8885a308d3` and folds each value as
//! `h = mix64(h.rotate_left(5) ^ v)`. Signed values are folded as their
//! two's-complement `u64`.
//!
//! Any change here changes every fingerprint bit; bump [`HASH_VERSION`].

/// Recorded in fingerprint cache headers.
pub const HASH_VERSION: u32 = 1;

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const SEQUENCE_SEED: u64 = 0x243f_6a88_85a3_08d3;

pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn hash_sequence(values: &[u64]) -> u64 {
    values.iter().fold(SEQUENCE_SEED, |h, &v| mix64(h.rotate_left(5) ^ v))
}
