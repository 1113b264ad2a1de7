//! Level-synchronous backward search: enumerate precursors, prune with the
//! one-step network, rank with the two-step network, keep a beam, and
//! reconstruct scored pathways.

mod gold;
mod reconstruct;
mod search;

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use retrokit_core::molgraph::SmilesError;
use retrokit_core::pattern::Provenance;
use retrokit_core::CanonicalSmiles;

use crate::ranking::RankingError;

pub use gold::{gold_step_ranks, parse_gold_tsv, GoldPathway, GoldStepRank};
pub use reconstruct::{pathways_tsv, reconstruct_pathways, PathStep, PathStepReport, Pathway, PathwayReport};
pub use search::{
    expand_level, rank_level, run_retro, Child, LevelExpansion, LevelStats, RetroReport, RetroResult,
    REPORT_SCHEMA_VERSION,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("target does not parse: {0}")]
    TargetParse(SmilesError),
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Ranking(#[from] RankingError),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    pub max_steps: usize,
    /// Children kept for expansion per level (not per parent).
    pub beam_width: usize,
    /// Minimum one-step network score for a child to be kept.
    pub prune_threshold: f64,
    /// Available metabolites; a node whose precursors include one is a hit
    /// and is not expanded further.
    #[serde(serialize_with = "keys_as_strings")]
    pub stop_set: BTreeSet<CanonicalSmiles>,
    /// Node budget, root included.
    pub max_nodes: usize,
}

fn keys_as_strings<S: serde::Serializer>(keys: &BTreeSet<CanonicalSmiles>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(keys.iter().map(CanonicalSmiles::as_str))
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_steps: 3,
            beam_width: 10,
            prune_threshold: 0.0,
            stop_set: BTreeSet::new(),
            max_nodes: 100_000,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::InvalidConfig(m.to_string()));
        if self.max_steps == 0 {
            return bad("max_steps must be at least 1");
        }
        if self.beam_width == 0 {
            return bad("beam_width must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.prune_threshold) {
            return bad("prune_threshold must lie in [0, 1]");
        }
        if self.max_nodes == 0 {
            return bad("max_nodes must be at least 1");
        }
        Ok(())
    }
}

/// A molecule reached by backward expansion. `precursors` is the set that
/// replaced the parent molecule; `molecule` is its main component.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchNode {
    pub id: usize,
    pub molecule: CanonicalSmiles,
    pub depth: usize,
    pub precursors: Vec<CanonicalSmiles>,
    /// One-step network score of the step into this node.
    pub step_score: f64,
    /// Score used to rank this node within its level.
    pub rank_score: f64,
    pub parent: Option<usize>,
    pub provenance: Vec<Provenance>,
    pub hit: bool,
}

/// Arena of search nodes; node 0 is the target.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchTree {
    pub nodes: Vec<SearchNode>,
}

impl SearchTree {
    pub fn new(target: CanonicalSmiles) -> Self {
        SearchTree {
            nodes: vec![SearchNode {
                id: 0,
                molecule: target,
                depth: 0,
                precursors: Vec::new(),
                step_score: 1.0,
                rank_score: 1.0,
                parent: None,
                provenance: Vec::new(),
                hit: false,
            }],
        }
    }

    pub fn node(&self, id: usize) -> &SearchNode {
        &self.nodes[id]
    }

    /// Node ids from the root down to `id`.
    pub fn path(&self, id: usize) -> Vec<usize> {
        let mut out = vec![id];
        let mut at = id;
        while let Some(p) = self.nodes[at].parent {
            out.push(p);
            at = p;
        }
        out.reverse();
        out
    }

    /// Precursor sets along the path to `id`, steps joined by `>`; unique
    /// per node.
    pub fn path_key(&self, id: usize) -> String {
        self.path(id)
            .into_iter()
            .skip(1)
            .map(|n| retrokit_core::pattern::join_keys(&self.nodes[n].precursors))
            .collect::<Vec<_>>()
            .join(">")
    }

    /// Path keys of every generated node. Two searches produced the same
    /// candidates exactly when these sets are equal.
    pub fn candidate_set(&self) -> BTreeSet<String> {
        (1..self.nodes.len()).map(|id| self.path_key(id)).collect()
    }
}
