//! Candidate scoring, deterministic ranking and coverage evaluation.

mod evaluate;
mod rank;
mod score;

use thiserror::Error;

use retrokit_core::fingerprint::FingerprintError;
use retrokit_neural::NeuralError;

pub use evaluate::{
    evaluate_ranking, CoverageCurve, EvalReport, Evaluation, RankRow, COVERAGE_KS, REPORT_SCHEMA_VERSION,
};
pub use rank::{rank_by_score, rank_candidates, Ranked, RankedCandidate};
pub use score::{score_baseline, score_nn1, score_nn2, training_examples, Featurizer, Scorer};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RankingError {
    #[error("precursor set is empty")]
    EmptyPrecursorSet,
    #[error("group `{0}` has no positive example")]
    GroupWithoutPositive(String),
    #[error("nothing to rank")]
    NoCandidates,
    #[error("{scorer} cannot score a {steps}-step example")]
    UnsupportedExample { scorer: &'static str, steps: usize },
    #[error(transparent)]
    Fingerprint(#[from] FingerprintError),
    #[error(transparent)]
    Neural(#[from] NeuralError),
}
