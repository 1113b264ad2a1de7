//! Molecular graphs and the SMILES subset used as the molecule currency.
//!
//! Supported SMILES: organic-subset atoms (`B` excluded), lowercase aromatic
//! atoms, bracket atoms with hydrogen count, charge and atom-map index,
//! branches, ring closures (`1`..`9`, `%nn`), explicit bonds `- = # :` and
//! `.` component separators. Stereo markers and isotopes are rejected.
//!
//! Kekulé input is kept as written: `C1=CC=CC=C1` and `c1ccccc1` are
//! different graphs with different canonical keys.

mod canon;
mod element;
mod hydrogens;
mod parse;
mod rings;
mod write;

use std::fmt;

use thiserror::Error;

pub use canon::{canonical_ranks, canonicalize, CanonicalSmiles};
pub use element::Element;
pub use hydrogens::{add_explicit_hydrogens, strip_explicit_hydrogens};
pub use parse::{parse_smiles, SmilesError, SmilesErrorKind};
pub(crate) use rings::ring_atoms;
pub use rings::ring_bonds;
pub use write::write_smiles;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Contribution to the valence sum; aromatic bonds count one, the
    /// shared pi electron is accounted for per atom.
    pub fn valence(self) -> u8 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            BondOrder::Single => '-',
            BondOrder::Double => '=',
            BondOrder::Triple => '#',
            BondOrder::Aromatic => ':',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub element: Element,
    pub aromatic: bool,
    /// Attached hydrogens that are not graph nodes.
    pub hydrogens: u8,
    pub charge: i8,
    pub map_index: Option<u32>,
}

impl Atom {
    pub fn new(element: Element) -> Self {
        Atom { element, aromatic: false, hydrogens: 0, charge: 0, map_index: None }
    }

    /// A hydrogen node that can be folded back into its neighbour's count.
    pub fn is_plain_hydrogen(&self) -> bool {
        self.element == Element::H && self.charge == 0 && self.map_index.is_none() && self.hydrogens == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

impl Bond {
    pub fn new(a: usize, b: usize, order: BondOrder) -> Self {
        Bond { a, b, order }
    }

    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a molecular graph needs at least one atom")]
    Empty,
    #[error("bond {bond} references atom {atom} out of range")]
    AtomOutOfRange { bond: usize, atom: usize },
    #[error("bond {0} is a self-loop")]
    SelfLoop(usize),
    #[error("atoms {0} and {1} are joined by more than one bond")]
    ParallelBond(usize, usize),
    #[error("atom {atom} ({element}) exceeds its maximum valence")]
    ValenceExceeded { atom: usize, element: Element },
}

/// A simple labelled graph of atoms and bonds.
#[derive(Clone, PartialEq, Eq)]
pub struct MolecularGraph {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl MolecularGraph {
    pub fn new(atoms: Vec<Atom>, bonds: Vec<Bond>) -> Result<Self, GraphError> {
        if atoms.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut adjacency = vec![Vec::new(); atoms.len()];
        for (i, bond) in bonds.iter().enumerate() {
            for atom in [bond.a, bond.b] {
                if atom >= atoms.len() {
                    return Err(GraphError::AtomOutOfRange { bond: i, atom });
                }
            }
            if bond.a == bond.b {
                return Err(GraphError::SelfLoop(i));
            }
            if adjacency[bond.a].iter().any(|&(n, _)| n == bond.b) {
                return Err(GraphError::ParallelBond(bond.a.min(bond.b), bond.a.max(bond.b)));
            }
            adjacency[bond.a].push((bond.b, i));
            adjacency[bond.b].push((bond.a, i));
        }
        Ok(MolecularGraph { atoms, bonds, adjacency })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn bond(&self, i: usize) -> &Bond {
        &self.bonds[i]
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    /// `(neighbour, bond index)` pairs of atom `i`.
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency[a].iter().find(|&&(n, _)| n == b).map(|&(_, bond)| bond)
    }

    pub fn into_parts(self) -> (Vec<Atom>, Vec<Bond>) {
        (self.atoms, self.bonds)
    }

    pub fn heavy_atom_count(&self) -> usize {
        self.atoms.iter().filter(|a| a.element != Element::H).count()
    }

    /// Number of neighbours that are not hydrogen nodes.
    pub fn heavy_degree(&self, i: usize) -> usize {
        self.adjacency[i].iter().filter(|&&(n, _)| self.atoms[n].element != Element::H).count()
    }

    /// Hydrogen count plus hydrogen-node neighbours.
    pub fn total_hydrogens(&self, i: usize) -> u8 {
        let nodes = self.adjacency[i].iter().filter(|&&(n, _)| self.atoms[n].element == Element::H).count();
        self.atoms[i].hydrogens.saturating_add(nodes as u8)
    }

    /// Sum of bond orders (aromatic counted as one) plus attached hydrogens.
    pub fn valence_used(&self, i: usize) -> u16 {
        let bonds: u16 = self.adjacency[i].iter().map(|&(_, b)| u16::from(self.bonds[b].order.valence())).sum();
        bonds + u16::from(self.atoms[i].hydrogens)
    }

    /// Extra bond order an aromatic atom carries for its ring pi bond.
    pub(crate) fn aromatic_bonus(&self, i: usize) -> u16 {
        let atom = &self.atoms[i];
        if !atom.aromatic || !atom.element.aromatic_pi_bond() {
            return 0;
        }
        let exocyclic_double = self.adjacency[i]
            .iter()
            .any(|&(_, b)| matches!(self.bonds[b].order, BondOrder::Double | BondOrder::Triple));
        u16::from(!exocyclic_double)
    }

    /// Hydrogens an organic-subset atom receives implicitly: the smallest
    /// allowed valence that covers its bonds, minus the bonds.
    pub fn default_hydrogens(&self, i: usize) -> Option<u8> {
        let atom = &self.atoms[i];
        let bonds = self.valence_used(i) - u16::from(atom.hydrogens);
        let allowed = atom.element.valences(atom.charge);
        let fill = |used: u16| allowed.iter().map(|&v| u16::from(v)).find(|&v| v >= used).map(|v| (v - used) as u8);
        let bonus = self.aromatic_bonus(i);
        if bonus > 0 {
            if let Some(h) = fill(bonds + bonus) {
                return Some(h);
            }
        }
        fill(bonds)
    }

    /// Valence check used by sanitization. With `exact`, the used valence
    /// must be one of the allowed valences; otherwise it may not exceed the
    /// largest one.
    pub fn valence_ok(&self, i: usize, exact: bool) -> bool {
        let atom = &self.atoms[i];
        let used = self.valence_used(i);
        let allowed = atom.element.valences(atom.charge);
        let Some(&max) = allowed.iter().max() else {
            return false;
        };
        if !exact {
            return used <= u16::from(max);
        }
        let bonus = self.aromatic_bonus(i);
        allowed.iter().any(|&v| u16::from(v) == used || (bonus > 0 && u16::from(v) == used + bonus))
    }

    /// Checks every atom against the maximum allowed valence.
    pub fn check_valences(&self) -> Result<(), GraphError> {
        for i in 0..self.atoms.len() {
            if !self.valence_ok(i, false) {
                return Err(GraphError::ValenceExceeded { atom: i, element: self.atoms[i].element });
            }
        }
        Ok(())
    }

    /// Connected components as sorted atom index lists, ordered by their
    /// smallest atom index.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.atoms.len()];
        let mut out = Vec::new();
        for start in 0..self.atoms.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut component = Vec::new();
            while let Some(a) = stack.pop() {
                component.push(a);
                for &(n, _) in &self.adjacency[a] {
                    if !seen[n] {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
            component.sort_unstable();
            out.push(component);
        }
        out
    }

    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    /// Induced subgraph on `atoms` (in the given order).
    pub fn subgraph(&self, atoms: &[usize]) -> MolecularGraph {
        let mut index = vec![usize::MAX; self.atoms.len()];
        for (new, &old) in atoms.iter().enumerate() {
            index[old] = new;
        }
        let new_atoms = atoms.iter().map(|&i| self.atoms[i].clone()).collect();
        let new_bonds = self
            .bonds
            .iter()
            .filter(|b| index[b.a] != usize::MAX && index[b.b] != usize::MAX)
            .map(|b| Bond::new(index[b.a], index[b.b], b.order))
            .collect();
        MolecularGraph::new(new_atoms, new_bonds).expect("induced subgraph of a valid graph")
    }

    pub fn split_components(&self) -> Vec<MolecularGraph> {
        self.components().iter().map(|c| self.subgraph(c)).collect()
    }

    /// Renumbers atoms so that old atom `i` becomes `order[i]`; bonds are
    /// emitted in `bond_order` sequence when given.
    pub fn permuted(&self, order: &[usize], bond_order: Option<&[usize]>) -> MolecularGraph {
        assert_eq!(order.len(), self.atoms.len());
        let mut atoms = vec![Atom::new(Element::C); self.atoms.len()];
        for (old, &new) in order.iter().enumerate() {
            atoms[new] = self.atoms[old].clone();
        }
        let remap = |b: &Bond| Bond::new(order[b.a], order[b.b], b.order);
        let bonds = match bond_order {
            Some(seq) => seq.iter().map(|&i| remap(&self.bonds[i])).collect(),
            None => self.bonds.iter().map(remap).collect(),
        };
        MolecularGraph::new(atoms, bonds).expect("permutation of a valid graph")
    }

    /// Copy with every atom-map index removed.
    pub fn without_map_indices(&self) -> MolecularGraph {
        let mut out = self.clone();
        for atom in &mut out.atoms {
            atom.map_index = None;
        }
        out
    }
}

impl fmt::Debug for MolecularGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MolecularGraph({})", write_smiles(self))
    }
}

impl fmt::Display for MolecularGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_smiles(self))
    }
}
