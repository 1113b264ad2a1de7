//! Circular fingerprints, reaction features and bit-vector similarity.
//!
//! Molecule fingerprints follow the Morgan/ECFP scheme on the heavy-atom
//! graph. Hydrogens enter only through the atom invariant. Defaults are
//! 512 bits and radius 2.

mod cache;
mod ecfp;
mod feature;
pub mod hash;
mod similarity;

use thiserror::Error;

pub use cache::{CacheError, FingerprintCache};
pub use ecfp::{molecule_fingerprint, set_fingerprint, DEFAULT_RADIUS, DEFAULT_WIDTH};
pub use feature::{reaction_feature, ReactionFeature};
pub use similarity::{tanimoto, tversky};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FingerprintError {
    #[error("fingerprint width {0} is not a power of two")]
    WidthNotPowerOfTwo(usize),
    #[error("width mismatch: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },
    #[error("similarity weights must be non-negative (alpha {alpha}, beta {beta})")]
    NegativeParameter { alpha: f64, beta: f64 },
    #[error("a reaction feature takes 1 or 2 precursor blocks, got {0}")]
    BlockCount(usize),
    #[error("an empty precursor set has no fingerprint")]
    EmptySet,
}

/// Fixed-width bit vector. Bit `i` lives in word `i / 64` at position
/// `i % 64`; unused high bits of the last word stay zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    words: Vec<u64>,
    width: usize,
}

impl Fingerprint {
    /// All-zero vector. Widths need not be powers of two here; molecule
    /// fingerprints check that separately.
    pub fn zeros(width: usize) -> Self {
        Fingerprint { words: vec![0; width.div_ceil(64)], width }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut fp = Fingerprint::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                fp.set(i);
            }
        }
        fp
    }

    /// Parses a string of `0`/`1` characters, bit 0 first.
    pub fn from_bit_string(text: &str) -> Option<Self> {
        let bits: Option<Vec<bool>> = text
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
        bits.map(|b| Fingerprint::from_bools(&b))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.width, "bit {i} out of range {}", self.width);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        assert!(i < self.width, "bit {i} out of range {}", self.width);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of set bits in increasing order.
    pub fn ones(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.count_ones());
        for (k, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(k * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn check_width(&self, other: &Fingerprint) -> Result<(), FingerprintError> {
        if self.width != other.width {
            return Err(FingerprintError::WidthMismatch { left: self.width, right: other.width });
        }
        Ok(())
    }

    pub fn union(&self, other: &Fingerprint) -> Result<Fingerprint, FingerprintError> {
        self.check_width(other)?;
        Ok(Fingerprint { words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(), width: self.width })
    }

    pub fn intersection_count(&self, other: &Fingerprint) -> Result<usize, FingerprintError> {
        self.check_width(other)?;
        Ok(self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum())
    }

    /// OR of all inputs, which must share one width.
    pub fn union_all(parts: &[Fingerprint]) -> Result<Fingerprint, FingerprintError> {
        let (first, rest) = parts.split_first().ok_or(FingerprintError::EmptySet)?;
        rest.iter().try_fold(first.clone(), |acc, fp| acc.union(fp))
    }

    /// Bits `start..start + len` as a new vector.
    pub fn slice(&self, start: usize, len: usize) -> Fingerprint {
        let mut out = Fingerprint::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i);
            }
        }
        out
    }

    /// Blocks laid end to end.
    pub fn concat(parts: &[&Fingerprint]) -> Fingerprint {
        let width = parts.iter().map(|p| p.width).sum();
        let mut out = Fingerprint::zeros(width);
        let mut offset = 0;
        for part in parts {
            for i in part.ones() {
                out.set(offset + i);
            }
            offset += part.width;
        }
        out
    }

    /// Lower-case hex of the little-endian byte layout (bit 0 is the low
    /// bit of the first byte).
    pub fn to_hex(&self) -> String {
        let bytes: Vec<u8> = self.words.iter().flat_map(|w| w.to_le_bytes()).take(self.width.div_ceil(8)).collect();
        hex::encode(bytes)
    }

    pub fn from_hex(text: &str, width: usize) -> Option<Fingerprint> {
        let bytes = hex::decode(text).ok()?;
        if bytes.len() != width.div_ceil(8) {
            return None;
        }
        let mut fp = Fingerprint::zeros(width);
        for (k, byte) in bytes.iter().enumerate() {
            for bit in 0..8 {
                if byte >> bit & 1 == 1 {
                    let i = k * 8 + bit;
                    if i >= width {
                        return None;
                    }
                    fp.set(i);
                }
            }
        }
        Some(fp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_operations() {
        let a = Fingerprint::from_bit_string("1100").unwrap();
        let b = Fingerprint::from_bit_string("1010").unwrap();
        assert_eq!(a.union(&b).unwrap(), Fingerprint::from_bit_string("1110").unwrap());
        assert_eq!(a.intersection_count(&b).unwrap(), 1);
        assert_eq!(a.ones(), vec![0, 1]);
        assert!(a.union(&Fingerprint::zeros(8)).is_err());
    }

    #[test]
    fn hex_round_trip() {
        let mut fp = Fingerprint::zeros(512);
        for i in [0, 7, 8, 63, 64, 300, 511] {
            fp.set(i);
        }
        let text = fp.to_hex();
        assert_eq!(text.len(), 128);
        assert!(text.starts_with("8101"));
        assert_eq!(Fingerprint::from_hex(&text, 512), Some(fp));
        assert_eq!(Fingerprint::from_hex("zz", 8), None);
        assert_eq!(Fingerprint::from_hex("ff", 4), None);
    }

    #[test]
    fn concat_and_slice() {
        let a = Fingerprint::from_bit_string("10").unwrap();
        let b = Fingerprint::from_bit_string("01").unwrap();
        let c = Fingerprint::concat(&[&a, &b]);
        assert_eq!(c, Fingerprint::from_bit_string("1001").unwrap());
        assert_eq!(c.slice(2, 2), b);
    }
}
