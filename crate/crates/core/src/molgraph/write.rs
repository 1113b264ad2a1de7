use std::fmt::Write as _;

use super::canon::canonical_form;
use super::{BondOrder, Element, MolecularGraph};

/// Writes `mol` as SMILES, keeping atom-map indices and hydrogen nodes.
///
/// The output is deterministic (canonical ordering with maps taken into
/// account) and re-parses to a label-identical graph.
pub fn write_smiles(mol: &MolecularGraph) -> String {
    canonical_form(mol, true).1
}

/// Writes every component by depth-first traversal in rank order; component
/// strings are sorted and joined with `.`.
pub(crate) fn write_ranked(mol: &MolecularGraph, ranks: &[usize]) -> String {
    let mut components: Vec<String> = mol
        .components()
        .into_iter()
        .map(|atoms| {
            let start = *atoms.iter().min_by_key(|&&a| ranks[a]).expect("non-empty component");
            write_component(mol, ranks, start)
        })
        .collect();
    components.sort();
    components.join(".")
}

enum Task {
    Atom(usize),
    Text(&'static str),
    Bond(usize),
}

fn write_component(mol: &MolecularGraph, ranks: &[usize], start: usize) -> String {
    let n = mol.atom_count();
    let sorted_neighbors = |a: usize| {
        let mut nbrs: Vec<(usize, usize)> = mol.neighbors(a).to_vec();
        nbrs.sort_by_key(|&(nb, _)| ranks[nb]);
        nbrs
    };

    // spanning tree and ring-closure bonds
    let mut visited = vec![false; n];
    let mut preorder = vec![usize::MAX; n];
    let mut parent_bond = vec![usize::MAX; n];
    let mut children: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut ring_bonds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut ring_seen = vec![false; mol.bond_count()];
    let mut counter = 0;
    visited[start] = true;
    preorder[start] = counter;
    counter += 1;
    let mut stack = vec![(start, sorted_neighbors(start), 0usize)];
    while let Some((atom, nbrs, slot)) = stack.last_mut() {
        let atom = *atom;
        let Some(&(next, bond)) = nbrs.get(*slot) else {
            stack.pop();
            continue;
        };
        *slot += 1;
        if bond == parent_bond[atom] {
            continue;
        }
        if !visited[next] {
            visited[next] = true;
            preorder[next] = counter;
            counter += 1;
            parent_bond[next] = bond;
            children[atom].push((next, bond));
            let nn = sorted_neighbors(next);
            stack.push((next, nn, 0));
        } else if !ring_seen[bond] {
            ring_seen[bond] = true;
            ring_bonds[atom].push(bond);
            ring_bonds[next].push(bond);
        }
    }

    let mut out = String::new();
    let mut digits_in_use: Vec<bool> = vec![false; 100];
    let mut bond_digit: Vec<Option<usize>> = vec![None; mol.bond_count()];
    let mut emitted = vec![false; n];
    let mut tasks = vec![Task::Atom(start)];
    while let Some(task) = tasks.pop() {
        match task {
            Task::Text(t) => out.push_str(t),
            Task::Bond(b) => out.push_str(bond_symbol(mol, b)),
            Task::Atom(a) => {
                emitted[a] = true;
                write_atom(mol, a, &mut out);
                let mut rings = ring_bonds[a].clone();
                // closures before openings, each by partner traversal order
                rings.sort_by_key(|&b| {
                    let partner = mol.bond(b).other(a);
                    (!emitted[partner], preorder[partner])
                });
                for b in rings {
                    let partner = mol.bond(b).other(a);
                    let digit = match bond_digit[b] {
                        Some(d) if emitted[partner] => {
                            digits_in_use[d] = false;
                            d
                        }
                        _ => {
                            let d = (1..100).find(|&d| !digits_in_use[d]).expect("fewer than 99 open rings");
                            digits_in_use[d] = true;
                            bond_digit[b] = Some(d);
                            out.push_str(bond_symbol(mol, b));
                            d
                        }
                    };
                    if digit < 10 {
                        let _ = write!(out, "{digit}");
                    } else {
                        let _ = write!(out, "%{digit:02}");
                    }
                }
                let kids = &children[a];
                for (k, &(child, bond)) in kids.iter().enumerate().rev() {
                    if k + 1 == kids.len() {
                        tasks.push(Task::Atom(child));
                        tasks.push(Task::Bond(bond));
                    } else {
                        tasks.push(Task::Text(")"));
                        tasks.push(Task::Atom(child));
                        tasks.push(Task::Bond(bond));
                        tasks.push(Task::Text("("));
                    }
                }
            }
        }
    }
    out
}

fn bond_symbol(mol: &MolecularGraph, b: usize) -> &'static str {
    let bond = mol.bond(b);
    let both_aromatic = mol.atom(bond.a).aromatic && mol.atom(bond.b).aromatic;
    match bond.order {
        BondOrder::Single if both_aromatic => "-",
        BondOrder::Single => "",
        BondOrder::Aromatic if both_aromatic => "",
        BondOrder::Aromatic => ":",
        BondOrder::Double => "=",
        BondOrder::Triple => "#",
    }
}

fn write_atom(mol: &MolecularGraph, i: usize, out: &mut String) {
    let atom = mol.atom(i);
    let symbol =
        if atom.aromatic { atom.element.symbol().to_ascii_lowercase() } else { atom.element.symbol().to_string() };
    let organic = atom.element.is_organic_subset()
        && atom.charge == 0
        && atom.map_index.is_none()
        && mol.default_hydrogens(i) == Some(atom.hydrogens);
    if organic {
        out.push_str(&symbol);
        return;
    }
    out.push('[');
    out.push_str(&symbol);
    match atom.hydrogens {
        0 => {}
        1 => out.push('H'),
        h => {
            let _ = write!(out, "H{h}");
        }
    }
    match atom.charge {
        0 => {}
        1 => out.push('+'),
        -1 => out.push('-'),
        q if q > 0 => {
            let _ = write!(out, "+{q}");
        }
        q => {
            let _ = write!(out, "-{}", -i16::from(q));
        }
    }
    if let Some(map) = atom.map_index {
        let _ = write!(out, ":{map}");
    }
    out.push(']');
    debug_assert!(atom.element != Element::H || !organic);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::{canonicalize, parse_smiles};

    fn round_trip(s: &str) {
        let mol = parse_smiles(s).unwrap();
        let written = write_smiles(&mol);
        let again = parse_smiles(&written).unwrap_or_else(|e| panic!("{s} -> {written}: {e}"));
        assert_eq!(canonicalize(&again), canonicalize(&mol), "{s} -> {written}");
        assert_eq!(write_smiles(&again), written);
    }

    #[test]
    fn singleton_and_ethanol() {
        assert_eq!(write_smiles(&parse_smiles("C").unwrap()), "C");
        round_trip("CCO");
    }

    #[test]
    fn two_components_give_one_dot() {
        let written = write_smiles(&parse_smiles("CCO.[NH4+]").unwrap());
        assert_eq!(written.matches('.').count(), 1);
        let again = parse_smiles(&written).unwrap();
        assert_eq!(again.component_count(), 2);
    }

    #[test]
    fn assorted_round_trips() {
        for s in [
            "c1ccccc1",
            "C1=CC=CC=C1",
            "c1ccc2ccccc2c1",
            "C1CC2CCC1CC2",
            "OC(=O)CCC(=O)O",
            "[CH3:1][O-:2]",
            "C#CC=CC",
            "c1ccc(-c2ccccc2)cc1",
            "[nH]1cccc1",
            "O=c1cccc[nH]1",
            "C1:C:C:C:C:C:1",
            "[H]OC([H])([H])[H]",
            "NC(CCC(=O)O)C(=O)O",
            "OP(=O)(O)OCC1OC(O)C(O)C1O",
            "C12C3C4C1C5C2C3C45",
            "[O--].[O--]",
        ] {
            round_trip(s);
        }
    }
}
