use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use retrokit_core::pattern::{enumerate_precursors, CandidatePrecursor, ReactionTemplate};
use retrokit_core::CanonicalSmiles;
use retrokit_neural::MlpModel;

use super::gold::{gold_step_ranks, GoldPathway, GoldStepRank};
use super::reconstruct::{reconstruct_pathways, PathwayReport};
use super::{Pathway, PipelineError, SearchConfig, SearchNode, SearchTree};
use crate::ranking::{rank_by_score, score_nn1, score_nn2, Featurizer, Ranked, RankingError};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// A proposed expansion of a frontier node that survived pruning.
#[derive(Debug, Clone, PartialEq)]
pub struct Child {
    pub parent: usize,
    pub candidate: CandidatePrecursor,
    pub nn1_score: f64,
}

/// Children of one level plus what was filtered out on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelExpansion {
    pub children: Vec<Child>,
    pub enumerated: usize,
    pub cycles_dropped: usize,
    pub pruned: usize,
}

/// Counters for one search level.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LevelStats {
    pub depth: usize,
    pub frontier: usize,
    pub enumerated: usize,
    pub cycles_dropped: usize,
    pub pruned: usize,
    pub added: usize,
    pub hits: usize,
    pub expanded_next: usize,
}

/// Expands every frontier node in parallel. A child is dropped when its
/// main precursor already appears on its own path, or when the one-step
/// network scores it below the prune threshold.
pub fn expand_level(
    tree: &SearchTree,
    frontier: &[usize],
    templates: &[ReactionTemplate],
    nn1: &MlpModel,
    featurizer: &Featurizer,
    config: &SearchConfig,
) -> Result<LevelExpansion, RankingError> {
    let per_node: Vec<Result<LevelExpansion, RankingError>> = frontier
        .par_iter()
        .map(|&id| {
            let node = tree.node(id);
            let on_path: HashSet<&CanonicalSmiles> =
                tree.path(id).into_iter().map(|n| &tree.node(n).molecule).collect();
            let product = featurizer.molecule(&node.molecule);
            let candidates = enumerate_precursors(&node.molecule.to_graph(), templates);
            let mut out =
                LevelExpansion { children: Vec::new(), enumerated: candidates.len(), cycles_dropped: 0, pruned: 0 };
            for candidate in candidates {
                if on_path.contains(candidate.main_precursor()) {
                    out.cycles_dropped += 1;
                    continue;
                }
                let score = score_nn1(nn1, &product, &[featurizer.set(&candidate.precursors)])?;
                if score < config.prune_threshold {
                    out.pruned += 1;
                    continue;
                }
                out.children.push(Child { parent: id, candidate, nn1_score: score });
            }
            Ok(out)
        })
        .collect();
    let mut merged = LevelExpansion { children: Vec::new(), enumerated: 0, cycles_dropped: 0, pruned: 0 };
    for part in per_node {
        let part = part?;
        merged.children.extend(part.children);
        merged.enumerated += part.enumerated;
        merged.cycles_dropped += part.cycles_dropped;
        merged.pruned += part.pruned;
    }
    Ok(merged)
}

/// Ranks one level's children across all parents. First-level children
/// keep their one-step score; deeper children are scored by the two-step
/// network on (grandparent, parent precursors, child precursors) when it is
/// given, and by the one-step score otherwise.
pub fn rank_level(
    tree: &SearchTree,
    children: Vec<Child>,
    nn2: Option<&MlpModel>,
    featurizer: &Featurizer,
) -> Result<Vec<Ranked<Child>>, RankingError> {
    let scored: Vec<Result<(Child, String, f64), RankingError>> = children
        .into_par_iter()
        .map(|child| {
            let parent = tree.node(child.parent);
            let score = match (nn2, parent.parent) {
                (Some(model), Some(grandparent)) => score_nn2(
                    model,
                    &featurizer.molecule(&tree.node(grandparent).molecule),
                    &[featurizer.set(&parent.precursors)],
                    &[featurizer.set(&child.candidate.precursors)],
                )?,
                _ => child.nn1_score,
            };
            let prefix = tree.path_key(child.parent);
            let key =
                if prefix.is_empty() { child.candidate.key() } else { format!("{prefix}>{}", child.candidate.key()) };
            Ok((child, key, score))
        })
        .collect();
    Ok(rank_by_score(scored.into_iter().collect::<Result<Vec<_>, _>>()?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetroReport {
    pub schema_version: u32,
    pub target: String,
    pub ranking: &'static str,
    pub config: SearchConfig,
    pub levels: Vec<LevelStats>,
    pub node_count: usize,
    pub budget_exceeded: bool,
    pub gold: Option<Vec<GoldStepRank>>,
    pub pathways: Vec<PathwayReport>,
}

/// Search tree, reconstructed pathways and the serializable report.
#[derive(Debug, Clone, PartialEq)]
pub struct RetroResult {
    pub tree: SearchTree,
    pub pathways: Vec<Pathway>,
    pub report: RetroReport,
}

/// Runs the search to `max_steps` levels (or until the frontier empties or
/// the node budget is hit), then reconstructs pathways and, when a gold
/// pathway is given, the rank of each of its steps.
pub fn run_retro(
    target: &str,
    templates: &[ReactionTemplate],
    nn1: &MlpModel,
    nn2: Option<&MlpModel>,
    config: &SearchConfig,
    gold: Option<&GoldPathway>,
) -> Result<RetroResult, PipelineError> {
    config.validate()?;
    let target = CanonicalSmiles::from_smiles(target).map_err(PipelineError::TargetParse)?;
    let featurizer = Featurizer::default();
    let mut tree = SearchTree::new(target.clone());
    let mut frontier = vec![0];
    let mut levels = Vec::new();
    let mut budget_exceeded = false;
    for depth in 1..=config.max_steps {
        if frontier.is_empty() || budget_exceeded {
            break;
        }
        let expansion = expand_level(&tree, &frontier, templates, nn1, &featurizer, config)?;
        let mut stats = LevelStats {
            depth,
            frontier: frontier.len(),
            enumerated: expansion.enumerated,
            cycles_dropped: expansion.cycles_dropped,
            pruned: expansion.pruned,
            ..LevelStats::default()
        };
        let ranked = rank_level(&tree, expansion.children, nn2, &featurizer)?;
        let mut next = Vec::new();
        for r in ranked {
            if tree.nodes.len() >= config.max_nodes {
                budget_exceeded = true;
                break;
            }
            let child = r.item;
            let id = tree.nodes.len();
            let hit = child.candidate.precursors.iter().any(|k| config.stop_set.contains(k));
            tree.nodes.push(SearchNode {
                id,
                molecule: child.candidate.main_precursor().clone(),
                depth,
                precursors: child.candidate.precursors,
                step_score: child.nn1_score,
                rank_score: r.score,
                parent: Some(child.parent),
                provenance: child.candidate.provenance,
                hit,
            });
            stats.added += 1;
            if hit {
                stats.hits += 1;
            } else if next.len() < config.beam_width {
                next.push(id);
            }
        }
        stats.expanded_next = if depth < config.max_steps { next.len() } else { 0 };
        levels.push(stats);
        frontier = next;
    }

    let pathways = reconstruct_pathways(&tree, config, nn2.is_some());
    for p in &pathways {
        p.check(config.max_steps).map_err(PipelineError::InvariantViolation)?;
    }
    let gold = match gold {
        Some(g) => Some(gold_step_ranks(g, templates, nn1, nn2, &featurizer)?),
        None => None,
    };
    let report = RetroReport {
        schema_version: REPORT_SCHEMA_VERSION,
        target: target.as_str().to_string(),
        ranking: if nn2.is_some() { "nn1pr+nn2pr" } else { "nn1pr" },
        config: config.clone(),
        levels,
        node_count: tree.nodes.len(),
        budget_exceeded,
        gold,
        pathways: pathways.iter().map(Pathway::report).collect(),
    };
    Ok(RetroResult { tree, pathways, report })
}
