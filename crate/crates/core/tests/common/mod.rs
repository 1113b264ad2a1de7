#![allow(dead_code)]

pub mod oracles;

use rand::seq::SliceRandom;
use rand::Rng;
use retrokit_core::molgraph::{Atom, Bond, BondOrder, Element, MolecularGraph};

/// Hand-written fixtures covering rings, aromatics, charges and heteroatoms.
pub const FIXTURES: &[&str] = &[
    "CCO",
    "c1ccccc1",
    "C1=CC=CC=C1",
    "Cc1ccccc1O",
    "OC(=O)CCC(=O)O",
    "NC(CCC(=O)O)C(=O)O",
    "OCCCCO",
    "O=CCCCO",
    "c1ccncc1",
    "c1cc[nH]c1",
    "C1CCC2CCCCC2C1",
    "CS(=O)(=O)O",
    "OP(=O)(O)OCC(O)CO",
    "[NH3+]CC(=O)[O-]",
    "CC(C)(C)Cl",
    "C#CCBr",
    "COc1cc(C=CC)ccc1O",
    "CCCC(C)(C)CCCC",
];

/// Random valid molecule with at most `max_atoms` heavy atoms: a random
/// tree, optional aromatic six-ring seed, a chance of an extra ring bond and
/// occasional double bonds. Hydrogens are filled from the valence table.
pub fn random_molecule<R: Rng>(rng: &mut R, max_atoms: usize) -> MolecularGraph {
    loop {
        if let Some(mol) = try_random_molecule(rng, max_atoms) {
            return mol;
        }
    }
}

fn try_random_molecule<R: Rng>(rng: &mut R, max_atoms: usize) -> Option<MolecularGraph> {
    let n = rng.gen_range(1..=max_atoms);
    let mut atoms: Vec<Atom> = Vec::new();
    let mut bonds: Vec<Bond> = Vec::new();
    let ring_seed = n >= 6 && rng.gen_bool(0.35);
    if ring_seed {
        for k in 0..6 {
            let mut atom = Atom::new(if k == 0 && rng.gen_bool(0.3) { Element::N } else { Element::C });
            atom.aromatic = true;
            atoms.push(atom);
            bonds.push(Bond::new(k, (k + 1) % 6, BondOrder::Aromatic));
        }
    }
    let palette = [Element::C, Element::C, Element::C, Element::C, Element::N, Element::O, Element::S, Element::Cl];
    while atoms.len() < n {
        let i = atoms.len();
        let e = *palette.choose(rng).unwrap();
        atoms.push(Atom::new(e));
        if i > 0 {
            let j = rng.gen_range(0..i);
            let order = if rng.gen_bool(0.15) && !atoms[j].aromatic { BondOrder::Double } else { BondOrder::Single };
            bonds.push(Bond::new(j, i, order));
        }
    }
    if n >= 4 && rng.gen_bool(0.3) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let exists = bonds.iter().any(|x| (x.a == a && x.b == b) || (x.a == b && x.b == a));
        if a != b && !exists && !(atoms[a].aromatic && atoms[b].aromatic) {
            bonds.push(Bond::new(a, b, BondOrder::Single));
        }
    }
    let bare = MolecularGraph::new(atoms, bonds).ok()?;
    let hydrogens: Option<Vec<u8>> = (0..bare.atom_count()).map(|i| bare.default_hydrogens(i)).collect();
    let hydrogens = hydrogens?;
    let (mut atoms, bonds) = bare.into_parts();
    for (atom, h) in atoms.iter_mut().zip(hydrogens) {
        atom.hydrogens = h;
    }
    let mol = MolecularGraph::new(atoms, bonds).ok()?;
    (0..mol.atom_count()).all(|i| mol.valence_ok(i, true)).then_some(mol)
}

pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}
