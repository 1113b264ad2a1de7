use serde::Serialize;

use retrokit_core::pattern::{enumerate_precursors, join_keys, ReactionTemplate};
use retrokit_core::CanonicalSmiles;
use retrokit_neural::MlpModel;

use crate::dataset::DatasetFileError;
use crate::ranking::{rank_by_score, score_nn1, score_nn2, Featurizer, RankingError};

/// A known pathway read backwards from the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldPathway {
    /// `(product, precursors)` per step; each step's main precursor is
    /// normally the next step's product.
    pub steps: Vec<(CanonicalSmiles, Vec<CanonicalSmiles>)>,
}

/// Where a gold step lands among all candidates generated for its product.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldStepRank {
    pub step: usize,
    pub product: String,
    pub precursors: String,
    /// `None` when the templates never generate the gold precursors.
    pub rank: Option<usize>,
    pub total: usize,
    pub score: Option<f64>,
}

/// Columns: step (1, 2, … in order), product SMILES, precursor SMILES
/// joined by `.`.
pub fn parse_gold_tsv(text: &str) -> Result<GoldPathway, DatasetFileError> {
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() || raw.starts_with('#') || raw.starts_with("step\t") {
            continue;
        }
        let f: Vec<&str> = raw.split('\t').collect();
        if f.len() != 3 {
            return Err(DatasetFileError::ColumnCount { line, expected: 3, found: f.len() });
        }
        if f[0].trim().parse::<usize>().ok() != Some(steps.len() + 1) {
            return Err(DatasetFileError::BadField { line, message: format!("expected step {}", steps.len() + 1) });
        }
        let smiles = |s: &str| {
            CanonicalSmiles::from_smiles(s.trim()).map_err(|source| DatasetFileError::Smiles { line, source })
        };
        let product = smiles(f[1])?;
        let mut precursors =
            f[2].split('.').filter(|s| !s.trim().is_empty()).map(smiles).collect::<Result<Vec<_>, _>>()?;
        if precursors.is_empty() {
            return Err(DatasetFileError::BadField { line, message: "no precursors".into() });
        }
        precursors.sort();
        steps.push((product, precursors));
    }
    if steps.is_empty() {
        return Err(DatasetFileError::BadField { line: 0, message: "gold pathway has no steps".into() });
    }
    Ok(GoldPathway { steps })
}

/// For each gold step, enumerates its product's candidates, scores them the
/// way the search level would (one-step network for the first step or
/// without a two-step network, two-step network on the gold context
/// otherwise) and reports the gold precursor set's rank.
pub fn gold_step_ranks(
    gold: &GoldPathway,
    templates: &[ReactionTemplate],
    nn1: &MlpModel,
    nn2: Option<&MlpModel>,
    featurizer: &Featurizer,
) -> Result<Vec<GoldStepRank>, RankingError> {
    let mut out = Vec::with_capacity(gold.steps.len());
    for (i, (product, precursors)) in gold.steps.iter().enumerate() {
        let candidates = enumerate_precursors(&product.to_graph(), templates);
        let product_fp = featurizer.molecule(product);
        let context = match (nn2, i) {
            (Some(model), i) if i > 0 => {
                let (prev_product, prev_precursors) = &gold.steps[i - 1];
                Some((model, featurizer.molecule(prev_product), featurizer.set(prev_precursors)))
            }
            _ => None,
        };
        let mut scored = Vec::with_capacity(candidates.len());
        for c in &candidates {
            let set = featurizer.set(&c.precursors);
            let score = match &context {
                Some((model, t, s1)) => score_nn2(model, t, std::slice::from_ref(s1), &[set])?,
                None => score_nn1(nn1, &product_fp, &[set])?,
            };
            scored.push((c.precursors == *precursors, c.key(), score));
        }
        let ranked = rank_by_score(scored);
        let hit = ranked.iter().find(|r| r.item);
        out.push(GoldStepRank {
            step: i + 1,
            product: product.as_str().to_string(),
            precursors: join_keys(precursors),
            rank: hit.map(|r| r.rank),
            total: ranked.len(),
            score: hit.map(|r| r.score),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gold_file_parses_in_order() {
        let g = parse_gold_tsv("step\tproduct\tprecursors\n1\tOCCCCO\tOCCCC=O\n2\tOCCCC=O\tO.OC(=O)CCCC=O\n").unwrap();
        assert_eq!(g.steps.len(), 2);
        assert_eq!(g.steps[1].1.len(), 2);
        assert!(parse_gold_tsv("2\tC\tC\n").is_err());
        assert!(parse_gold_tsv("1\tC\t\n").is_err());
        assert!(parse_gold_tsv("# nothing\n").is_err());
    }
}
