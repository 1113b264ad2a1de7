use super::{Fingerprint, FingerprintError};

/// Concatenated `target ∥ block1 [∥ block2]` bit vector fed to the ranking
/// networks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReactionFeature {
    bits: Fingerprint,
    block_width: usize,
}

impl ReactionFeature {
    pub fn width(&self) -> usize {
        self.bits.width()
    }

    pub fn block_width(&self) -> usize {
        self.block_width
    }

    pub fn block_count(&self) -> usize {
        self.bits.width() / self.block_width
    }

    /// Block `k`: 0 is the target, then the precursor blocks in order.
    pub fn block(&self, k: usize) -> Fingerprint {
        assert!(k < self.block_count(), "block {k} out of range");
        self.bits.slice(k * self.block_width, self.block_width)
    }

    pub fn bits(&self) -> &Fingerprint {
        &self.bits
    }

    /// Indices of set bits, for sparse network input.
    pub fn active(&self) -> Vec<usize> {
        self.bits.ones()
    }

    pub fn to_dense(&self) -> Vec<f32> {
        let mut out = vec![0.0; self.width()];
        for i in self.bits.ones() {
            out[i] = 1.0;
        }
        out
    }
}

/// Lays out `target` followed by one block per precursor entry (one entry
/// for a single step, two for a two-step chain). Multi-molecule sets must
/// already be OR-combined into one fingerprint per entry.
pub fn reaction_feature(target: &Fingerprint, precursors: &[Fingerprint]) -> Result<ReactionFeature, FingerprintError> {
    if !(1..=2).contains(&precursors.len()) {
        return Err(FingerprintError::BlockCount(precursors.len()));
    }
    for p in precursors {
        if p.width() != target.width() {
            return Err(FingerprintError::WidthMismatch { left: target.width(), right: p.width() });
        }
    }
    let mut parts = vec![target];
    parts.extend(precursors);
    Ok(ReactionFeature { bits: Fingerprint::concat(&parts), block_width: target.width() })
}
