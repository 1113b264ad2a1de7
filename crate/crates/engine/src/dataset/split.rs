use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::DatasetRow;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SplitError {
    #[error("fraction {0} must lie strictly between 0 and 1")]
    BadFraction(f64),
}

fn check_fraction(fraction: f64) -> Result<(), SplitError> {
    if fraction > 0.0 && fraction < 1.0 {
        Ok(())
    } else {
        Err(SplitError::BadFraction(fraction))
    }
}

/// Seeded group split: the distinct group keys are sorted, shuffled, and
/// the first `round(fraction * groups)` go to the test side. Rows keep their
/// relative order on each side.
pub fn split_train_test(
    rows: Vec<DatasetRow>,
    fraction: f64,
    seed: u64,
) -> Result<(Vec<DatasetRow>, Vec<DatasetRow>), SplitError> {
    check_fraction(fraction)?;
    let groups: BTreeSet<&str> = rows.iter().map(|r| r.group_key.as_str()).collect();
    let mut groups: Vec<&str> = groups.into_iter().collect();
    groups.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let take = (groups.len() as f64 * fraction).round() as usize;
    let test: HashSet<String> = groups[..take].iter().map(|g| g.to_string()).collect();
    Ok(rows.into_iter().partition(|r| !test.contains(&r.group_key)))
}

/// Keeps every positive and a seeded `fraction` of negatives (shuffle, then
/// prefix take, rounded up). Row order is preserved.
pub fn subsample_negatives(rows: Vec<DatasetRow>, fraction: f64, seed: u64) -> Result<Vec<DatasetRow>, SplitError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(SplitError::BadFraction(fraction));
    }
    let mut negatives: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i].label).collect();
    negatives.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let keep = ((negatives.len() as f64 * fraction).ceil() as usize).min(negatives.len());
    let kept: HashSet<usize> = negatives[..keep].iter().copied().collect();
    Ok(rows.into_iter().enumerate().filter(|(i, r)| r.label || kept.contains(i)).map(|(_, r)| r).collect())
}
