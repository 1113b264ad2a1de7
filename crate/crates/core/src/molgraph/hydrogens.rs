use super::{Atom, Bond, BondOrder, Element, GraphError, MolecularGraph};

/// Turns every attached hydrogen count into explicit hydrogen nodes.
///
/// New hydrogens are appended after the existing atoms, grouped by parent in
/// atom order. Applying it twice changes nothing.
pub fn add_explicit_hydrogens(mol: &MolecularGraph) -> Result<MolecularGraph, GraphError> {
    mol.check_valences()?;
    let (mut atoms, mut bonds) = mol.clone().into_parts();
    let parents = atoms.len();
    for parent in 0..parents {
        let count = std::mem::take(&mut atoms[parent].hydrogens);
        for _ in 0..count {
            let h = atoms.len();
            atoms.push(Atom::new(Element::H));
            bonds.push(Bond::new(parent, h, BondOrder::Single));
        }
    }
    MolecularGraph::new(atoms, bonds)
}

/// Folds plain hydrogen nodes (neutral, unmapped, single heavy neighbour)
/// back into their neighbour's hydrogen count.
pub fn strip_explicit_hydrogens(mol: &MolecularGraph) -> MolecularGraph {
    let removable: Vec<Option<usize>> = (0..mol.atom_count())
        .map(|i| {
            let atom = mol.atom(i);
            if !atom.is_plain_hydrogen() || mol.degree(i) != 1 {
                return None;
            }
            let (parent, bond) = mol.neighbors(i)[0];
            let heavy = mol.atom(parent).element != Element::H;
            (heavy && mol.bond(bond).order == BondOrder::Single).then_some(parent)
        })
        .collect();
    if removable.iter().all(Option::is_none) {
        return mol.clone();
    }
    let mut atoms: Vec<Atom> = mol.atoms().to_vec();
    for parent in removable.iter().flatten() {
        atoms[*parent].hydrogens = atoms[*parent].hydrogens.saturating_add(1);
    }
    let mut index = vec![usize::MAX; atoms.len()];
    let mut kept = Vec::new();
    for (i, atom) in atoms.into_iter().enumerate() {
        if removable[i].is_none() {
            index[i] = kept.len();
            kept.push(atom);
        }
    }
    let bonds = mol
        .bonds()
        .iter()
        .filter(|b| index[b.a] != usize::MAX && index[b.b] != usize::MAX)
        .map(|b| Bond::new(index[b.a], index[b.b], b.order))
        .collect();
    MolecularGraph::new(kept, bonds).expect("removing leaf hydrogens keeps the graph valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::{canonicalize, parse_smiles};

    fn count(mol: &MolecularGraph, e: Element) -> usize {
        mol.atoms().iter().filter(|a| a.element == e).count()
    }

    #[test]
    fn methane_and_water() {
        let methane = add_explicit_hydrogens(&parse_smiles("C").unwrap()).unwrap();
        assert_eq!((count(&methane, Element::C), count(&methane, Element::H)), (1, 4));
        assert_eq!(methane.bond_count(), 4);
        let water = add_explicit_hydrogens(&parse_smiles("O").unwrap()).unwrap();
        assert_eq!((count(&water, Element::O), count(&water, Element::H)), (1, 2));
    }

    #[test]
    fn formaldehyde_follows_valence_table() {
        // oracle: C valence 4 minus double bond 2 = 2; O valence 2 minus 2 = 0
        let mol = add_explicit_hydrogens(&parse_smiles("C=O").unwrap()).unwrap();
        let h_on = |i: usize| mol.neighbors(i).iter().filter(|&&(n, _)| mol.atom(n).element == Element::H).count();
        assert_eq!(h_on(0), 2);
        assert_eq!(h_on(1), 0);
    }

    #[test]
    fn idempotent_and_reversible() {
        for s in ["CCO", "c1ccccc1O", "[NH4+]", "OP(=O)(O)O", "CS(C)=O", "[H][H]"] {
            let mol = parse_smiles(s).unwrap();
            let once = add_explicit_hydrogens(&mol).unwrap();
            let twice = add_explicit_hydrogens(&once).unwrap();
            assert_eq!(once, twice, "{s}");
            assert_eq!(canonicalize(&strip_explicit_hydrogens(&once)), canonicalize(&mol), "{s}");
        }
    }

    #[test]
    fn valence_exceeded_is_reported() {
        let atoms = vec![Atom::new(Element::O), Atom::new(Element::C), Atom::new(Element::C), Atom::new(Element::C)];
        let bonds = vec![
            Bond::new(0, 1, BondOrder::Single),
            Bond::new(0, 2, BondOrder::Single),
            Bond::new(0, 3, BondOrder::Single),
        ];
        let mol = MolecularGraph::new(atoms, bonds).unwrap();
        assert!(matches!(
            add_explicit_hydrogens(&mol),
            Err(GraphError::ValenceExceeded { atom: 0, element: Element::O })
        ));
    }
}
