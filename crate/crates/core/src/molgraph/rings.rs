use super::MolecularGraph;

/// Marks bonds that lie on at least one cycle (non-bridges).
pub fn ring_bonds(graph: &MolecularGraph) -> Vec<bool> {
    let n = graph.atom_count();
    let mut in_ring = vec![true; graph.bond_count()];
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0;
    // iterative Tarjan bridge search; frames hold (atom, parent bond, next neighbour slot)
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        disc[root] = time;
        low[root] = time;
        time += 1;
        while let Some(frame) = stack.last_mut() {
            let (atom, parent_bond, slot) = *frame;
            if let Some(&(next, bond)) = graph.neighbors(atom).get(slot) {
                frame.2 += 1;
                if bond == parent_bond {
                    continue;
                }
                if disc[next] == usize::MAX {
                    disc[next] = time;
                    low[next] = time;
                    time += 1;
                    stack.push((next, bond, 0));
                } else {
                    low[atom] = low[atom].min(disc[next]);
                }
            } else {
                stack.pop();
                if let Some(&(parent, _, _)) = stack.last() {
                    low[parent] = low[parent].min(low[atom]);
                    if low[atom] > disc[parent] {
                        in_ring[parent_bond] = false;
                    }
                }
            }
        }
    }
    in_ring
}

/// Marks atoms that carry at least one ring bond.
pub(crate) fn ring_atoms(graph: &MolecularGraph) -> Vec<bool> {
    let bonds = ring_bonds(graph);
    let mut atoms = vec![false; graph.atom_count()];
    for (i, bond) in graph.bonds().iter().enumerate() {
        if bonds[i] {
            atoms[bond.a] = true;
            atoms[bond.b] = true;
        }
    }
    atoms
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;

    #[test]
    fn bridges_are_not_ring_bonds() {
        let mol = parse_smiles("C1CC1CC1CCC1").unwrap();
        let rings = ring_bonds(&mol);
        let bridges: Vec<_> = (0..mol.bond_count()).filter(|&i| !rings[i]).collect();
        assert_eq!(bridges.len(), 2);
        assert!(ring_bonds(&parse_smiles("CCCC").unwrap()).iter().all(|&r| !r));
        assert!(ring_bonds(&parse_smiles("C1CCCCC1").unwrap()).iter().all(|&r| r));
    }
}
