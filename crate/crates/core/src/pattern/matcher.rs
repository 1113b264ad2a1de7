use crate::molgraph::MolecularGraph;

use super::smarts::PatternGraph;

/// Injective assignment of pattern atoms (by index) to target atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MatchMapping {
    pub assignment: Vec<usize>,
}

/// Every injective, constraint-satisfying mapping of `pattern` into
/// `target`, sorted lexicographically by assignment. Interchangeable atoms
/// produce one mapping per permutation.
pub fn find_matches(pattern: &PatternGraph, target: &MolecularGraph) -> Vec<MatchMapping> {
    let n = pattern.atom_count();
    if n == 0 || n > target.atom_count() {
        return Vec::new();
    }
    let candidates: Vec<Vec<usize>> = pattern
        .atoms()
        .iter()
        .map(|pa| (0..target.atom_count()).filter(|&t| pa.matches(target, t)).collect())
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let order = search_order(pattern, &candidates);
    let mut allowed = vec![vec![false; target.atom_count()]; n];
    for (p, list) in candidates.iter().enumerate() {
        for &t in list {
            allowed[p][t] = true;
        }
    }
    // for each position, an earlier-placed neighbour whose image restricts candidates
    let placed_at: Vec<usize> = {
        let mut pos = vec![0; n];
        for (k, &p) in order.iter().enumerate() {
            pos[p] = k;
        }
        pos
    };
    let anchors: Vec<Option<usize>> = order
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            pattern.neighbors(p).iter().map(|&(q, _)| q).filter(|&q| placed_at[q] < k).min_by_key(|&q| placed_at[q])
        })
        .collect();

    let mut state = Search {
        pattern,
        target,
        order: &order,
        anchors: &anchors,
        allowed: &allowed,
        candidates: &candidates,
        assignment: vec![usize::MAX; n],
        used: vec![false; target.atom_count()],
        results: Vec::new(),
    };
    state.extend(0);
    let mut results = state.results;
    results.sort();
    results
}

/// Rarest candidate list first, then grow along pattern bonds so that each
/// later atom can be drawn from a placed neighbour's adjacency.
fn search_order(pattern: &PatternGraph, candidates: &[Vec<usize>]) -> Vec<usize> {
    let n = pattern.atom_count();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let frontier = (0..n).filter(|&p| !placed[p] && pattern.neighbors(p).iter().any(|&(q, _)| placed[q]));
        let next = frontier
            .min_by_key(|&p| (candidates[p].len(), p))
            .or_else(|| (0..n).filter(|&p| !placed[p]).min_by_key(|&p| (candidates[p].len(), p)))
            .expect("unplaced atom remains");
        placed[next] = true;
        order.push(next);
    }
    order
}

struct Search<'a> {
    pattern: &'a PatternGraph,
    target: &'a MolecularGraph,
    order: &'a [usize],
    anchors: &'a [Option<usize>],
    allowed: &'a [Vec<bool>],
    candidates: &'a [Vec<usize>],
    assignment: Vec<usize>,
    used: Vec<bool>,
    results: Vec<MatchMapping>,
}

impl Search<'_> {
    fn extend(&mut self, k: usize) {
        if k == self.order.len() {
            self.results.push(MatchMapping { assignment: self.assignment.clone() });
            return;
        }
        let p = self.order[k];
        let pool: Vec<usize> = match self.anchors[k] {
            Some(q) => self.target.neighbors(self.assignment[q]).iter().map(|&(t, _)| t).collect(),
            None => self.candidates[p].clone(),
        };
        for t in pool {
            if self.used[t] || !self.allowed[p][t] || !self.bonds_agree(p, t) {
                continue;
            }
            self.assignment[p] = t;
            self.used[t] = true;
            self.extend(k + 1);
            self.used[t] = false;
            self.assignment[p] = usize::MAX;
        }
    }

    fn bonds_agree(&self, p: usize, t: usize) -> bool {
        self.pattern.neighbors(p).iter().all(|&(q, bond)| {
            let tq = self.assignment[q];
            if tq == usize::MAX {
                return true;
            }
            match self.target.bond_between(t, tq) {
                Some(b) => self.pattern.bonds()[bond].constraint.matches(self.target.bond(b).order),
                None => false,
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::{add_explicit_hydrogens, parse_smiles};
    use crate::pattern::smarts::parse_smarts;

    fn count(pattern: &str, target: &str) -> usize {
        find_matches(&parse_smarts(pattern, 0).unwrap(), &parse_smiles(target).unwrap()).len()
    }

    #[test]
    fn carbon_in_ethane() {
        assert_eq!(count("C", "CC"), 2);
        assert_eq!(count("CC", "CC"), 2);
    }

    #[test]
    fn aliphatic_pattern_misses_benzene() {
        assert_eq!(count("CC", "c1ccccc1"), 0);
        assert_eq!(count("cc", "c1ccccc1"), 12);
    }

    #[test]
    fn interchangeable_hydrogens_double_the_count() {
        let pattern = parse_smarts("[H]C[H]", 0).unwrap();
        let target = add_explicit_hydrogens(&parse_smiles("C").unwrap()).unwrap();
        let n = find_matches(&pattern, &target).len();
        assert_eq!(n, 12);
        assert_eq!(n % 2, 0);
    }

    #[test]
    fn results_are_sorted_and_injective() {
        let pattern = parse_smarts("C~C", 0).unwrap();
        let target = parse_smiles("CC(C)C").unwrap();
        let matches = find_matches(&pattern, &target);
        assert_eq!(matches.len(), 6);
        assert!(matches.windows(2).all(|w| w[0] < w[1]));
        assert!(matches.iter().all(|m| m.assignment[0] != m.assignment[1]));
    }

    #[test]
    fn disconnected_pattern_and_bond_constraints() {
        assert_eq!(count("C.O", "CCO"), 2);
        assert_eq!(count("C=O", "CC=O"), 1);
        assert_eq!(count("C-O", "CC=O"), 0);
        assert_eq!(count("[CH3][OH]", "CO"), 1);
        assert_eq!(count("[D2]", "CCC"), 1);
        assert_eq!(count("C", "O"), 0);
    }
}
