use std::fmt;

use super::hydrogens::strip_explicit_hydrogens;
use super::parse::{parse_smiles, SmilesError};
use super::write::write_ranked;
use super::MolecularGraph;

/// Canonical SMILES text: the molecule key used across modules and on disk.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalSmiles(String);

impl CanonicalSmiles {
    /// Parses arbitrary SMILES and returns its canonical form.
    pub fn from_smiles(text: &str) -> Result<Self, SmilesError> {
        Ok(canonicalize(&parse_smiles(text)?))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    /// Re-parses the key. Canonical keys always parse.
    pub fn to_graph(&self) -> MolecularGraph {
        parse_smiles(&self.0).expect("canonical SMILES re-parses")
    }
}

impl fmt::Display for CanonicalSmiles {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for CanonicalSmiles {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Canonical SMILES of `mol` with atom maps and plain hydrogen nodes removed.
pub fn canonicalize(mol: &MolecularGraph) -> CanonicalSmiles {
    let bare = strip_explicit_hydrogens(&mol.without_map_indices());
    CanonicalSmiles(canonical_form(&bare, false).1)
}

/// Unique atom ranks (0-based) that order `mol` canonically. Map indices
/// take part in the atom invariants when `use_maps` is set.
pub fn canonical_ranks(mol: &MolecularGraph, use_maps: bool) -> Vec<usize> {
    canonical_form(mol, use_maps).0
}

/// Components are canonicalized independently and concatenated in string
/// order; ranks are offset so that earlier components rank lower.
pub(crate) fn canonical_form(mol: &MolecularGraph, use_maps: bool) -> (Vec<usize>, String) {
    let components = mol.components();
    if components.len() == 1 {
        return component_form(mol, use_maps);
    }
    let mut parts: Vec<(String, Vec<usize>, Vec<usize>)> = components
        .into_iter()
        .map(|atoms| {
            let (ranks, text) = component_form(&mol.subgraph(&atoms), use_maps);
            (text, atoms, ranks)
        })
        .collect();
    parts.sort_by(|a, b| a.0.cmp(&b.0));
    let mut ranks = vec![0; mol.atom_count()];
    let mut offset = 0;
    let mut texts = Vec::with_capacity(parts.len());
    for (text, atoms, local) in parts {
        for (k, &atom) in atoms.iter().enumerate() {
            ranks[atom] = offset + local[k];
        }
        offset += atoms.len();
        texts.push(text);
    }
    (ranks, texts.join("."))
}

fn component_form(mol: &MolecularGraph, use_maps: bool) -> (Vec<usize>, String) {
    let initial = initial_classes(mol, use_maps);
    let refined = refine(mol, initial);
    let mut search = TieSearch { mol, leaves_left: LEAF_BUDGET, best: None };
    search.explore(refined);
    search.best.expect("at least one leaf is explored")
}

/// Upper bound on fully explored tie-break branches. Branches beyond it
/// follow the first candidate only; ties that survive refinement are almost
/// always symmetric atoms whose choices give the same string anyway.
const LEAF_BUDGET: usize = 256;

fn initial_classes(mol: &MolecularGraph, use_maps: bool) -> Vec<usize> {
    let keys: Vec<_> = (0..mol.atom_count())
        .map(|i| {
            let atom = mol.atom(i);
            (
                atom.element.atomic_number(),
                atom.aromatic,
                mol.degree(i),
                atom.charge,
                mol.total_hydrogens(i),
                if use_maps { atom.map_index.unwrap_or(0) } else { 0 },
            )
        })
        .collect();
    dense_rank(&keys)
}

fn dense_rank<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter().map(|k| sorted.binary_search(k).expect("key present")).collect()
}

fn class_count(classes: &[usize]) -> usize {
    classes.iter().max().map_or(0, |m| m + 1)
}

/// Iterated neighbourhood refinement until the partition stops splitting.
fn refine(mol: &MolecularGraph, mut classes: Vec<usize>) -> Vec<usize> {
    let mut count = class_count(&classes);
    loop {
        let keys: Vec<(usize, Vec<(usize, u8)>)> = (0..mol.atom_count())
            .map(|i| {
                let mut nbrs: Vec<(usize, u8)> =
                    mol.neighbors(i).iter().map(|&(n, b)| (classes[n], mol.bond(b).order.code())).collect();
                nbrs.sort_unstable();
                (classes[i], nbrs)
            })
            .collect();
        let next = dense_rank(&keys);
        let next_count = class_count(&next);
        if next_count == count {
            return next;
        }
        classes = next;
        count = next_count;
    }
}

struct TieSearch<'a> {
    mol: &'a MolecularGraph,
    leaves_left: usize,
    best: Option<(Vec<usize>, String)>,
}

impl TieSearch<'_> {
    fn explore(&mut self, classes: Vec<usize>) {
        let n = classes.len();
        let mut sizes = vec![0usize; n];
        for &c in &classes {
            sizes[c] += 1;
        }
        let Some(tied) = (0..n).find(|&c| sizes[c] > 1) else {
            self.leaves_left = self.leaves_left.saturating_sub(1);
            let text = write_ranked(self.mol, &classes);
            let better = self.best.as_ref().is_none_or(|(_, b)| text < *b);
            if better {
                self.best = Some((classes, text));
            }
            return;
        };
        let members: Vec<usize> = (0..n).filter(|&i| classes[i] == tied).collect();
        for (k, &chosen) in members.iter().enumerate() {
            if k > 0 && self.leaves_left == 0 {
                break;
            }
            let split: Vec<(usize, bool)> = (0..n).map(|i| (classes[i], i != chosen)).collect();
            let next = refine(self.mol, dense_rank(&split));
            self.explore(next);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::{parse_smiles, write_smiles};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn canon(s: &str) -> String {
        canonicalize(&parse_smiles(s).unwrap()).into_string()
    }

    #[test]
    fn traversal_order_does_not_matter() {
        assert_eq!(canon("OCC"), canon("CCO"));
        assert_eq!(canon("C(C)(C)O"), canon("CC(O)C"));
        assert_eq!(canon("c1ccccc1C"), canon("Cc1ccccc1"));
        assert_eq!(canon("O.CC"), canon("CC.O"));
        assert_eq!(canon("[CH4]"), canon("C"));
    }

    #[test]
    fn methane_is_stable() {
        assert_eq!(canon("C"), "C");
        assert_eq!(canon("C"), canon("C"));
    }

    #[test]
    fn kekule_and_aromatic_differ() {
        assert_ne!(canon("C1=CC=CC=C1"), canon("c1ccccc1"));
    }

    #[test]
    fn idempotent() {
        for s in ["CCO", "c1ccc2ccccc2c1", "OC(=O)CCC(=O)O", "C1CC2CCC1CC2", "[NH4+].[Cl-]", "C#N"] {
            let once = canon(s);
            assert_eq!(canon(&once), once, "{s}");
        }
    }

    #[test]
    fn maps_are_stripped() {
        assert_eq!(canon("[CH3:1][OH:2]"), canon("CO"));
    }

    #[test]
    fn thousand_permutations_of_a_twelve_atom_fixture() {
        let mol = parse_smiles("COc1cc(C=CC)ccc1O").unwrap();
        assert_eq!(mol.atom_count(), 12);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..1000 {
            let mut order: Vec<usize> = (0..mol.atom_count()).collect();
            order.shuffle(&mut rng);
            let mut bonds: Vec<usize> = (0..mol.bond_count()).collect();
            bonds.shuffle(&mut rng);
            seen.insert(canonicalize(&mol.permuted(&order, Some(&bonds))));
        }
        assert_eq!(seen.len(), 1);
    }

    #[test]
    fn ranks_are_a_permutation() {
        let mol = parse_smiles("CC(C)(C)C").unwrap();
        let mut ranks = canonical_ranks(&mol, false);
        ranks.sort_unstable();
        assert_eq!(ranks, (0..5).collect::<Vec<_>>());
        assert_eq!(write_smiles(&mol), "CC(C)(C)C");
    }
}
