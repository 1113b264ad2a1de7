use rayon::prelude::*;
use retrokit_core::fingerprint::{molecule_fingerprint, reaction_feature, tanimoto, Fingerprint, ReactionFeature};
use retrokit_core::fingerprint::{DEFAULT_RADIUS, DEFAULT_WIDTH};
use retrokit_core::pattern::main_component;
use retrokit_core::CanonicalSmiles;
use retrokit_neural::{Example, Input, MlpModel};

use super::RankingError;
use crate::dataset::DatasetRow;

/// Molecule and precursor-set fingerprints with fixed width and radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Featurizer {
    pub width: usize,
    pub radius: usize,
}

impl Default for Featurizer {
    fn default() -> Self {
        Featurizer { width: DEFAULT_WIDTH, radius: DEFAULT_RADIUS }
    }
}

impl Featurizer {
    pub fn molecule(&self, key: &CanonicalSmiles) -> Fingerprint {
        molecule_fingerprint(&key.to_graph(), self.width, self.radius).expect("featurizer width is a power of two")
    }

    /// OR of the members' fingerprints.
    pub fn set(&self, keys: &[CanonicalSmiles]) -> Fingerprint {
        let mut fp = Fingerprint::zeros(self.width);
        for k in keys {
            fp = fp.union(&self.molecule(k)).expect("same width");
        }
        fp
    }
}

impl Featurizer {
    /// Network input for a dataset row: the target block followed by one
    /// OR-combined block per step.
    pub fn row_input(&self, row: &DatasetRow) -> Result<Input, RankingError> {
        if row.steps.is_empty() || row.steps.iter().any(Vec::is_empty) {
            return Err(RankingError::EmptyPrecursorSet);
        }
        let blocks: Vec<Fingerprint> = row.steps.iter().map(|s| self.set(s)).collect();
        let feature = reaction_feature(&self.molecule(&row.target), &blocks)?;
        Ok(input_of(&feature))
    }
}

/// Training examples for `rows`, in row order.
pub fn training_examples(featurizer: &Featurizer, rows: &[DatasetRow]) -> Result<Vec<Example>, RankingError> {
    rows.par_iter()
        .map(|row| Ok(Example { input: featurizer.row_input(row)?, label: row.label, weight: row.weight }))
        .collect()
}

fn combine(precursors: &[Fingerprint]) -> Result<Fingerprint, RankingError> {
    if precursors.is_empty() {
        return Err(RankingError::EmptyPrecursorSet);
    }
    Ok(Fingerprint::union_all(precursors)?)
}

fn input_of(feature: &ReactionFeature) -> Input {
    Input::Binary { dim: feature.width(), active: feature.active().into_iter().map(|i| i as u32).collect() }
}

/// Tanimoto similarity between the target and the OR of the precursors.
pub fn score_baseline(target: &Fingerprint, precursors: &[Fingerprint]) -> Result<f64, RankingError> {
    Ok(tanimoto(target, &combine(precursors)?)?)
}

/// One-step network score on `target ∥ OR(precursors)`.
pub fn score_nn1(model: &MlpModel, target: &Fingerprint, precursors: &[Fingerprint]) -> Result<f64, RankingError> {
    let feature = reaction_feature(target, &[combine(precursors)?])?;
    Ok(model.score(&input_of(&feature))?)
}

/// Two-step network score on `target ∥ OR(step1) ∥ OR(step2)`.
pub fn score_nn2(
    model: &MlpModel,
    target: &Fingerprint,
    step1: &[Fingerprint],
    step2: &[Fingerprint],
) -> Result<f64, RankingError> {
    let feature = reaction_feature(target, &[combine(step1)?, combine(step2)?])?;
    Ok(model.score(&input_of(&feature))?)
}

/// Scores dataset rows. On two-step rows the baseline and the one-step
/// network see only the most recent step (the step-1 main component and
/// its step-2 precursors); the two-step network sees the whole chain.
#[derive(Debug, Clone, Copy)]
pub enum Scorer<'a> {
    Baseline,
    Nn1(&'a MlpModel),
    Nn2(&'a MlpModel),
}

impl Scorer<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            Scorer::Baseline => "tanimoto",
            Scorer::Nn1(_) => "nn1pr",
            Scorer::Nn2(_) => "nn2pr",
        }
    }

    pub fn score_row(&self, featurizer: &Featurizer, row: &DatasetRow) -> Result<f64, RankingError> {
        let fp = |keys: &[CanonicalSmiles]| featurizer.set(keys);
        match (self, row.steps.as_slice()) {
            (Scorer::Nn2(model), [s1, s2]) => score_nn2(model, &featurizer.molecule(&row.target), &[fp(s1)], &[fp(s2)]),
            (Scorer::Nn2(_), steps) => {
                Err(RankingError::UnsupportedExample { scorer: self.name(), steps: steps.len() })
            }
            (_, [s1]) => self.one_step(&featurizer.molecule(&row.target), &fp(s1)),
            (_, [s1, s2]) => {
                if s1.is_empty() {
                    return Err(RankingError::EmptyPrecursorSet);
                }
                self.one_step(&featurizer.molecule(main_component(s1)), &fp(s2))
            }
            (_, steps) => Err(RankingError::UnsupportedExample { scorer: self.name(), steps: steps.len() }),
        }
    }

    fn one_step(&self, product: &Fingerprint, precursors: &Fingerprint) -> Result<f64, RankingError> {
        match self {
            Scorer::Baseline => score_baseline(product, std::slice::from_ref(precursors)),
            Scorer::Nn1(model) => score_nn1(model, product, std::slice::from_ref(precursors)),
            Scorer::Nn2(_) => unreachable!("two-step scorer handled by the caller"),
        }
    }
}
