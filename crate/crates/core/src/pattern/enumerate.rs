use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::molgraph::{CanonicalSmiles, MolecularGraph};

use super::template::{apply_template, ReactionTemplate};

/// Where a candidate came from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Provenance {
    pub template_id: String,
    pub ec_numbers: Vec<String>,
}

/// A distinct precursor set proposed for a target, with every template that
/// proposed it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidatePrecursor {
    /// Sorted canonical keys of the precursor molecules.
    pub precursors: Vec<CanonicalSmiles>,
    /// Sorted by template id; never empty.
    pub provenance: Vec<Provenance>,
}

impl CandidatePrecursor {
    /// The precursor set as one dotted SMILES string.
    pub fn key(&self) -> String {
        join_keys(&self.precursors)
    }

    /// The component with the most heavy atoms (ties: smallest key). It
    /// continues a chain; the others are co-substrates.
    pub fn main_precursor(&self) -> &CanonicalSmiles {
        main_component(&self.precursors)
    }
}

pub fn join_keys(keys: &[CanonicalSmiles]) -> String {
    keys.iter().map(CanonicalSmiles::as_str).collect::<Vec<_>>().join(".")
}

/// Largest component by heavy-atom count; ties go to the smallest key.
pub fn main_component(keys: &[CanonicalSmiles]) -> &CanonicalSmiles {
    keys.iter()
        .max_by(|a, b| heavy_atoms(a).cmp(&heavy_atoms(b)).then_with(|| b.cmp(a)))
        .expect("precursor sets are never empty")
}

fn heavy_atoms(key: &CanonicalSmiles) -> usize {
    key.to_graph().heavy_atom_count()
}

/// Applies every template to `target` and merges identical precursor sets.
///
/// Templates run in parallel; the output is sorted by first template id and
/// then by key, so it does not depend on scheduling. Templates that would
/// delete the whole target contribute nothing.
pub fn enumerate_precursors(target: &MolecularGraph, templates: &[ReactionTemplate]) -> Vec<CandidatePrecursor> {
    let per_template: Vec<(usize, Vec<Vec<CanonicalSmiles>>)> = templates
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let sets = apply_template(t, target)
                .map(|outcomes| outcomes.into_iter().map(|o| o.keys).collect())
                .unwrap_or_default();
            (i, sets)
        })
        .collect();
    let mut merged: BTreeMap<Vec<CanonicalSmiles>, Vec<Provenance>> = BTreeMap::new();
    for (i, sets) in per_template {
        let t = &templates[i];
        for keys in sets {
            merged
                .entry(keys)
                .or_default()
                .push(Provenance { template_id: t.template_id.clone(), ec_numbers: t.ec_numbers.clone() });
        }
    }
    let mut out: Vec<CandidatePrecursor> = merged
        .into_iter()
        .map(|(precursors, mut provenance)| {
            provenance.sort();
            provenance.dedup();
            CandidatePrecursor { precursors, provenance }
        })
        .collect();
    out.sort_by(|a, b| {
        a.provenance[0].template_id.cmp(&b.provenance[0].template_id).then_with(|| a.precursors.cmp(&b.precursors))
    });
    out
}
