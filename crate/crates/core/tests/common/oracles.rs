//! Independent oracles shared by the matcher and template tests.

use std::collections::BTreeSet;

use rand::Rng;
use retrokit_core::molgraph::{canonicalize, Bond, BondOrder, CanonicalSmiles, Element, MolecularGraph};
use retrokit_core::pattern::{BondConstraint, PatternAtom, PatternBond, PatternGraph};

pub const LOOSE: &str = "[C:1]([H:4])[C:2][C:3]>>[C:1]=[C:2].[C:3][H:4]";
pub const CONSTRAINED: &str = "[C:1]([H:4])([H:9])([C:8])[C:2]([H:10])([H:11])[C:3]([C:5])([C:6])[C:7]\
                           >>[C:1]([H:9])([C:8])=[C:2]([H:10])[H:11].[C:3]([C:5])([C:6])([C:7])[H:4]";
pub const PRODUCT: &str = "CCCC(C)(C)CCCC";

fn is_carbon(mol: &MolecularGraph, i: usize) -> bool {
    let a = mol.atom(i);
    a.element == Element::C && !a.aromatic
}

fn carbon_neighbors(mol: &MolecularGraph, i: usize) -> Vec<usize> {
    mol.neighbors(i).iter().map(|&(n, _)| n).filter(|&n| is_carbon(mol, n)).collect()
}

fn single(mol: &MolecularGraph, a: usize, b: usize) -> bool {
    mol.bond_between(a, b).is_some_and(|x| mol.bond(x).order == BondOrder::Single)
}

/// Oracle for the hydrogen-transfer cleavage: for every carbon path c1-c2-c3
/// with a hydrogen on c1, move one H from c1 to c3, cut c2-c3 and make
/// c1=c2 double. Keeps results where every carbon stays tetravalent.
fn cleavage_outcome(mol: &MolecularGraph, c1: usize, c2: usize, c3: usize) -> Option<Vec<CanonicalSmiles>> {
    let (mut atoms, bonds) = mol.clone().into_parts();
    atoms[c1].hydrogens -= 1;
    atoms[c3].hydrogens += 1;
    let bonds: Vec<Bond> = bonds
        .into_iter()
        .filter(|b| !((b.a == c2 && b.b == c3) || (b.a == c3 && b.b == c2)))
        .map(|b| {
            if (b.a == c1 && b.b == c2) || (b.a == c2 && b.b == c1) {
                Bond::new(b.a, b.b, BondOrder::Double)
            } else {
                b
            }
        })
        .collect();
    let out = MolecularGraph::new(atoms, bonds).ok()?;
    for i in [c1, c2, c3] {
        let used: u16 = out.neighbors(i).iter().map(|&(_, b)| u16::from(out.bond(b).order.valence())).sum::<u16>()
            + u16::from(out.atom(i).hydrogens);
        if used != 4 {
            return None;
        }
    }
    let mut keys: Vec<CanonicalSmiles> = out.split_components().iter().map(canonicalize).collect();
    keys.sort();
    Some(keys)
}

/// (distinct outcomes, raw match count) for the loose template.
pub fn loose_oracle(mol: &MolecularGraph) -> (usize, usize) {
    let mut outcomes = BTreeSet::new();
    let mut raw = 0;
    for c1 in (0..mol.atom_count()).filter(|&i| is_carbon(mol, i)) {
        let h1 = mol.atom(c1).hydrogens as usize;
        for c2 in carbon_neighbors(mol, c1).into_iter().filter(|&c2| single(mol, c1, c2)) {
            for c3 in carbon_neighbors(mol, c2).into_iter().filter(|&c3| c3 != c1 && single(mol, c2, c3)) {
                raw += h1;
                if h1 > 0 {
                    if let Some(keys) = cleavage_outcome(mol, c1, c2, c3) {
                        outcomes.insert(keys);
                    }
                }
            }
        }
    }
    (outcomes.len(), raw)
}

/// Same for the constrained template: c1 carries two H and another carbon
/// c8, c2 carries two H, c3 carries three further carbons.
pub fn constrained_oracle(mol: &MolecularGraph) -> (usize, usize) {
    let perm = |n: usize, k: usize| (0..k).map(|i| n.saturating_sub(i)).product::<usize>();
    let mut outcomes = BTreeSet::new();
    let mut raw = 0;
    for c1 in (0..mol.atom_count()).filter(|&i| is_carbon(mol, i)) {
        for c2 in carbon_neighbors(mol, c1).into_iter().filter(|&c2| single(mol, c1, c2)) {
            for c3 in carbon_neighbors(mol, c2).into_iter().filter(|&c3| c3 != c1 && single(mol, c2, c3)) {
                let c8s: Vec<usize> = carbon_neighbors(mol, c1)
                    .into_iter()
                    .filter(|&x| x != c2 && x != c3 && single(mol, c1, x))
                    .collect();
                for c8 in c8s {
                    let others: Vec<usize> = carbon_neighbors(mol, c3)
                        .into_iter()
                        .filter(|&x| ![c1, c2, c8].contains(&x) && single(mol, c3, x))
                        .collect();
                    let count = perm(mol.atom(c1).hydrogens as usize, 2)
                        * perm(mol.atom(c2).hydrogens as usize, 2)
                        * perm(others.len(), 3);
                    raw += count;
                    if count > 0 {
                        if let Some(keys) = cleavage_outcome(mol, c1, c2, c3) {
                            outcomes.insert(keys);
                        }
                    }
                }
            }
        }
    }
    (outcomes.len(), raw)
}

pub fn random_pattern<R: Rng>(rng: &mut R) -> PatternGraph {
    let n = rng.gen_range(1..=4);
    let atoms: Vec<PatternAtom> = (0..n)
        .map(|_| PatternAtom {
            element: match rng.gen_range(0..10) {
                0..=2 => None,
                3 => Some(Element::N),
                4 => Some(Element::O),
                _ => Some(Element::C),
            },
            aromatic: [None, None, None, None, Some(false), Some(true)][rng.gen_range(0..6)],
            charge: None,
            degree: rng.gen_bool(0.15).then(|| rng.gen_range(1..=3)),
            hydrogens: rng.gen_bool(0.15).then(|| rng.gen_range(0..=3)),
            map_index: None,
        })
        .collect();
    let constraints = [
        BondConstraint::Unspecified,
        BondConstraint::Unspecified,
        BondConstraint::Unspecified,
        BondConstraint::Any,
        BondConstraint::Any,
        BondConstraint::Exactly(BondOrder::Single),
        BondConstraint::Exactly(BondOrder::Double),
        BondConstraint::Exactly(BondOrder::Aromatic),
    ];
    let mut bonds = Vec::new();
    for i in 1..n {
        // occasionally leave the pattern disconnected
        if rng.gen_bool(0.9) {
            let j = rng.gen_range(0..i);
            bonds.push(PatternBond { a: j, b: i, constraint: constraints[rng.gen_range(0..constraints.len())] });
        }
    }
    PatternGraph::new(atoms, bonds)
}

/// Exhaustive oracle: every injective assignment, with constraints checked
/// directly against the target's fields.
pub fn brute_force(pattern: &PatternGraph, target: &MolecularGraph) -> BTreeSet<Vec<usize>> {
    let n = pattern.atom_count();
    let m = target.atom_count();
    let mut out = BTreeSet::new();
    let mut current = Vec::with_capacity(n);
    fn atom_ok(p: &PatternAtom, t: &MolecularGraph, i: usize) -> bool {
        let a = t.atom(i);
        let h_nodes = t.neighbors(i).iter().filter(|&&(x, _)| t.atom(x).element == Element::H).count();
        let total_h = a.hydrogens as usize + h_nodes;
        p.element.is_none_or(|e| e == a.element)
            && p.aromatic.is_none_or(|x| x == a.aromatic)
            && p.charge.is_none_or(|q| q == a.charge)
            && p.degree.is_none_or(|d| d as usize == t.neighbors(i).len())
            && p.hydrogens.is_none_or(|h| h as usize == total_h)
    }
    fn bond_ok(c: BondConstraint, order: BondOrder) -> bool {
        match c {
            BondConstraint::Any => true,
            BondConstraint::Unspecified => order == BondOrder::Single || order == BondOrder::Aromatic,
            BondConstraint::Exactly(o) => o == order,
        }
    }
    fn rec(
        pattern: &PatternGraph,
        target: &MolecularGraph,
        current: &mut Vec<usize>,
        out: &mut BTreeSet<Vec<usize>>,
        n: usize,
        m: usize,
    ) {
        if current.len() == n {
            let ok = pattern.bonds().iter().all(|b| {
                let (ta, tb) = (current[b.a], current[b.b]);
                target
                    .bonds()
                    .iter()
                    .find(|x| (x.a == ta && x.b == tb) || (x.a == tb && x.b == ta))
                    .is_some_and(|x| bond_ok(b.constraint, x.order))
            });
            if ok {
                out.insert(current.clone());
            }
            return;
        }
        for t in 0..m {
            if current.contains(&t) || !atom_ok(&pattern.atoms()[current.len()], target, t) {
                continue;
            }
            current.push(t);
            rec(pattern, target, current, out, n, m);
            current.pop();
        }
    }
    rec(pattern, target, &mut current, &mut out, n, m);
    out
}
