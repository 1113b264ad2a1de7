use std::collections::HashSet;
use std::fmt::Write;

use serde::Serialize;

use retrokit_core::pattern::{join_keys, main_component};
use retrokit_core::CanonicalSmiles;

use super::{SearchConfig, SearchTree};
use crate::ranking::rank_by_score;

/// One backward step of a pathway.
#[derive(Debug, Clone, PartialEq)]
pub struct PathStep {
    pub product: CanonicalSmiles,
    pub precursors: Vec<CanonicalSmiles>,
    pub ec_numbers: Vec<String>,
    pub template_ids: Vec<String>,
    /// One-step network score.
    pub step_score: f64,
    /// Level ranking score; for steps after the first with a two-step
    /// network, the score of the window ending at this step.
    pub window_score: f64,
}

/// A chain of steps from the target, ranked among all reconstructed
/// pathways.
#[derive(Debug, Clone, PartialEq)]
pub struct Pathway {
    pub steps: Vec<PathStep>,
    pub aggregate_score: f64,
    pub aggregate_rank: usize,
    /// Search node at the end of the chain.
    pub node: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathStepReport {
    pub product: String,
    pub precursors: Vec<String>,
    pub ec_numbers: Vec<String>,
    pub template_ids: Vec<String>,
    pub step_score: f64,
    pub window_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathwayReport {
    pub rank: usize,
    pub aggregate_score: f64,
    pub steps: Vec<PathStepReport>,
}

impl Pathway {
    /// Precursor sets joined by `>`, the search path key of the end node.
    pub fn key(&self) -> String {
        self.steps.iter().map(|s| join_keys(&s.precursors)).collect::<Vec<_>>().join(">")
    }

    /// Chain validity: each step's main precursor is the next step's
    /// product, no molecule repeats along the chain, length within bounds.
    pub fn check(&self, max_steps: usize) -> Result<(), String> {
        if self.steps.is_empty() || self.steps.len() > max_steps {
            return Err(format!("pathway has {} steps (max {max_steps})", self.steps.len()));
        }
        let mut seen = HashSet::new();
        for (i, step) in self.steps.iter().enumerate() {
            if !seen.insert(&step.product) {
                return Err(format!("molecule {} repeats along the pathway", step.product));
            }
            let main = main_component(&step.precursors);
            match self.steps.get(i + 1) {
                Some(next) if &next.product != main => {
                    return Err(format!(
                        "step {} ends in {main} but step {} starts from {}",
                        i + 1,
                        i + 2,
                        next.product
                    ));
                }
                None if seen.contains(main) => {
                    return Err(format!("molecule {main} repeats along the pathway"));
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn report(&self) -> PathwayReport {
        PathwayReport {
            rank: self.aggregate_rank,
            aggregate_score: self.aggregate_score,
            steps: self
                .steps
                .iter()
                .map(|s| PathStepReport {
                    product: s.product.as_str().to_string(),
                    precursors: s.precursors.iter().map(|k| k.as_str().to_string()).collect(),
                    ec_numbers: s.ec_numbers.clone(),
                    template_ids: s.template_ids.clone(),
                    step_score: s.step_score,
                    window_score: s.window_score,
                })
                .collect(),
        }
    }
}

/// Tab-separated pathway listing, one row per step.
pub fn pathways_tsv(pathways: &[Pathway]) -> String {
    let mut out = String::from(
        "pathway_rank\taggregate_score\tstep\tproduct\tprecursors\tec_numbers\ttemplate_ids\tstep_score\n",
    );
    for p in pathways {
        for (i, s) in p.steps.iter().enumerate() {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                p.aggregate_rank,
                p.aggregate_score,
                i + 1,
                s.product,
                join_keys(&s.precursors),
                s.ec_numbers.join(";"),
                s.template_ids.join(";"),
                s.step_score
            );
        }
    }
    out
}

fn geometric_mean(values: &[f64]) -> f64 {
    (values.iter().map(|v| v.ln()).sum::<f64>() / values.len() as f64).exp()
}

/// Backtracks from every hit (or, with an empty stop set, from every node
/// at the deepest level reached) and ranks the resulting pathways.
///
/// A one-step pathway scores its one-step network score. Longer pathways
/// score the geometric mean of their overlapping two-step window scores
/// when a two-step network ranked the search, and of their one-step scores
/// otherwise.
pub fn reconstruct_pathways(tree: &SearchTree, config: &SearchConfig, windowed: bool) -> Vec<Pathway> {
    let ends: Vec<usize> = if config.stop_set.is_empty() {
        let deepest = tree.nodes.iter().map(|n| n.depth).max().unwrap_or(0);
        if deepest == 0 {
            return Vec::new();
        }
        tree.nodes.iter().filter(|n| n.depth == deepest).map(|n| n.id).collect()
    } else {
        tree.nodes.iter().filter(|n| n.hit).map(|n| n.id).collect()
    };
    let scored: Vec<(Pathway, String, f64)> = ends
        .into_iter()
        .map(|end| {
            let steps: Vec<PathStep> = tree
                .path(end)
                .into_iter()
                .skip(1)
                .map(|id| {
                    let node = tree.node(id);
                    let parent = tree.node(node.parent.expect("non-root node"));
                    let mut ec: Vec<String> =
                        node.provenance.iter().flat_map(|p| p.ec_numbers.iter().cloned()).collect();
                    ec.sort();
                    ec.dedup();
                    PathStep {
                        product: parent.molecule.clone(),
                        precursors: node.precursors.clone(),
                        ec_numbers: ec,
                        template_ids: node.provenance.iter().map(|p| p.template_id.clone()).collect(),
                        step_score: node.step_score,
                        window_score: node.rank_score,
                    }
                })
                .collect();
            let scores: Vec<f64> = if steps.len() == 1 {
                vec![steps[0].step_score]
            } else if windowed {
                steps[1..].iter().map(|s| s.window_score).collect()
            } else {
                steps.iter().map(|s| s.step_score).collect()
            };
            let aggregate = geometric_mean(&scores);
            let pathway = Pathway { steps, aggregate_score: aggregate, aggregate_rank: 0, node: end };
            let key = pathway.key();
            (pathway, key, aggregate)
        })
        .collect();
    rank_by_score(scored).into_iter().map(|r| Pathway { aggregate_rank: r.rank, ..r.item }).collect()
}
