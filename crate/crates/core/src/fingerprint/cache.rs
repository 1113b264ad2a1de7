use std::collections::BTreeMap;

use thiserror::Error;

use crate::molgraph::CanonicalSmiles;

use super::ecfp::molecule_fingerprint;
use super::hash::HASH_VERSION;
use super::{Fingerprint, FingerprintError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CacheError {
    #[error("fingerprint cache has no header line")]
    MissingHeader,
    #[error("fingerprint cache header {found:?} does not match {expected:?}")]
    HeaderMismatch { found: String, expected: String },
    #[error("fingerprint cache line {line} is malformed")]
    BadRow { line: usize },
}

/// Canonical key → fingerprint table for one (width, radius, hash version).
///
/// On disk: a header `#fingerprint-cache\twidth=W\tradius=R\thash=V`, then
/// one `key\thex` row per molecule in key order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FingerprintCache {
    width: usize,
    radius: usize,
    entries: BTreeMap<String, Fingerprint>,
}

impl FingerprintCache {
    pub fn new(width: usize, radius: usize) -> Result<Self, FingerprintError> {
        if !width.is_power_of_two() {
            return Err(FingerprintError::WidthNotPowerOfTwo(width));
        }
        Ok(FingerprintCache { width, radius, entries: BTreeMap::new() })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&Fingerprint> {
        self.entries.get(key)
    }

    /// Cached fingerprint of `key`, computed and stored on first use.
    pub fn fingerprint(&mut self, key: &CanonicalSmiles) -> &Fingerprint {
        let (width, radius) = (self.width, self.radius);
        self.entries.entry(key.as_str().to_string()).or_insert_with(|| {
            molecule_fingerprint(&key.to_graph(), width, radius).expect("width checked at construction")
        })
    }

    fn header(width: usize, radius: usize) -> String {
        format!("#fingerprint-cache\twidth={width}\tradius={radius}\thash={HASH_VERSION}")
    }

    pub fn to_tsv(&self) -> String {
        let mut out = Self::header(self.width, self.radius);
        out.push('\n');
        for (key, fp) in &self.entries {
            out.push_str(key);
            out.push('\t');
            out.push_str(&fp.to_hex());
            out.push('\n');
        }
        out
    }

    /// Loads a cache written for exactly this width, radius and hash
    /// version; any other header invalidates the file.
    pub fn from_tsv(text: &str, width: usize, radius: usize) -> Result<Self, CacheError> {
        let mut lines = text.lines();
        let found = lines.next().ok_or(CacheError::MissingHeader)?.trim_end_matches('\r');
        if !found.starts_with("#fingerprint-cache") {
            return Err(CacheError::MissingHeader);
        }
        let expected = Self::header(width, radius);
        if found != expected {
            return Err(CacheError::HeaderMismatch { found: found.to_string(), expected });
        }
        let mut cache = FingerprintCache::new(width, radius).map_err(|_| CacheError::HeaderMismatch {
            found: found.to_string(),
            expected: Self::header(width, radius),
        })?;
        for (n, row) in lines.enumerate() {
            let line = n + 2;
            let row = row.trim_end_matches('\r');
            if row.is_empty() {
                continue;
            }
            let (key, hex) = row.split_once('\t').ok_or(CacheError::BadRow { line })?;
            if key.is_empty() {
                return Err(CacheError::BadRow { line });
            }
            let fp = Fingerprint::from_hex(hex, width).ok_or(CacheError::BadRow { line })?;
            cache.entries.insert(key.to_string(), fp);
        }
        Ok(cache)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_header_check() {
        let mut cache = FingerprintCache::new(512, 2).unwrap();
        let ethanol = CanonicalSmiles::from_smiles("CCO").unwrap();
        let fp = cache.fingerprint(&ethanol).clone();
        cache.fingerprint(&CanonicalSmiles::from_smiles("c1ccccc1").unwrap());
        let text = cache.to_tsv();
        let loaded = FingerprintCache::from_tsv(&text, 512, 2).unwrap();
        assert_eq!(loaded, cache);
        assert_eq!(loaded.get("CCO"), Some(&fp));
        assert!(matches!(FingerprintCache::from_tsv(&text, 1024, 2), Err(CacheError::HeaderMismatch { .. })));
        assert!(matches!(FingerprintCache::from_tsv(&text, 512, 3), Err(CacheError::HeaderMismatch { .. })));
        assert_eq!(FingerprintCache::from_tsv("", 512, 2), Err(CacheError::MissingHeader));
        let broken = format!("{}\nCCO\tnothex\n", FingerprintCache::header(512, 2));
        assert_eq!(FingerprintCache::from_tsv(&broken, 512, 2), Err(CacheError::BadRow { line: 2 }));
    }
}
