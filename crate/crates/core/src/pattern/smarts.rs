use std::collections::HashMap;

use thiserror::Error;

use crate::molgraph::{BondOrder, Element, MolecularGraph};

/// Constraints on a single target atom. Unset fields match anything.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PatternAtom {
    pub element: Option<Element>,
    pub aromatic: Option<bool>,
    pub charge: Option<i8>,
    pub degree: Option<u8>,
    /// Total attached hydrogens (counted plus explicit nodes).
    pub hydrogens: Option<u8>,
    pub map_index: Option<u32>,
}

impl PatternAtom {
    pub fn is_wildcard(&self) -> bool {
        self.element.is_none()
            && self.aromatic.is_none()
            && self.charge.is_none()
            && self.degree.is_none()
            && self.hydrogens.is_none()
    }

    pub fn matches(&self, mol: &MolecularGraph, i: usize) -> bool {
        let atom = mol.atom(i);
        self.element.is_none_or(|e| e == atom.element)
            && self.aromatic.is_none_or(|a| a == atom.aromatic)
            && self.charge.is_none_or(|q| q == atom.charge)
            && self.degree.is_none_or(|d| usize::from(d) == mol.degree(i))
            && self.hydrogens.is_none_or(|h| h == mol.total_hydrogens(i))
    }

    /// Number of constraints set; used to compare template specificity.
    pub fn constraint_count(&self) -> usize {
        [
            self.element.is_some(),
            self.aromatic.is_some(),
            self.charge.is_some(),
            self.degree.is_some(),
            self.hydrogens.is_some(),
        ]
        .into_iter()
        .filter(|&b| b)
        .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BondConstraint {
    /// No bond symbol written: single or aromatic.
    Unspecified,
    Exactly(BondOrder),
    /// `~`
    Any,
}

impl BondConstraint {
    pub fn matches(self, order: BondOrder) -> bool {
        match self {
            BondConstraint::Unspecified => matches!(order, BondOrder::Single | BondOrder::Aromatic),
            BondConstraint::Exactly(o) => o == order,
            BondConstraint::Any => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PatternBond {
    pub a: usize,
    pub b: usize,
    pub constraint: BondConstraint,
}

/// A parsed SMARTS pattern: atoms with constraints joined by bond constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternGraph {
    atoms: Vec<PatternAtom>,
    bonds: Vec<PatternBond>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl PatternGraph {
    pub fn new(atoms: Vec<PatternAtom>, bonds: Vec<PatternBond>) -> Self {
        let mut adjacency = vec![Vec::new(); atoms.len()];
        for (i, b) in bonds.iter().enumerate() {
            adjacency[b.a].push((b.b, i));
            adjacency[b.b].push((b.a, i));
        }
        PatternGraph { atoms, bonds, adjacency }
    }

    pub fn atoms(&self) -> &[PatternAtom] {
        &self.atoms
    }

    pub fn atoms_mut(&mut self) -> &mut [PatternAtom] {
        &mut self.atoms
    }

    pub fn bonds(&self) -> &[PatternBond] {
        &self.bonds
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<&PatternBond> {
        self.adjacency[a].iter().find(|&&(n, _)| n == b).map(|&(_, i)| &self.bonds[i])
    }

    pub fn atom_with_map(&self, map: u32) -> Option<usize> {
        self.atoms.iter().position(|a| a.map_index == Some(map))
    }

    /// Whether hydrogens appear as pattern atoms.
    pub fn has_explicit_hydrogens(&self) -> bool {
        self.atoms.iter().any(|a| a.element == Some(Element::H))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at byte {offset}")]
pub struct SmartsSyntaxError {
    pub offset: usize,
    pub message: String,
}

struct RingOpening {
    atom: usize,
    constraint: Option<BondConstraint>,
}

/// Parses one side of a reaction SMARTS. `base` is added to error offsets.
pub fn parse_smarts(text: &str, base: usize) -> Result<PatternGraph, SmartsSyntaxError> {
    let input = text.as_bytes();
    let err = |offset: usize, message: &str| SmartsSyntaxError { offset: base + offset, message: message.to_string() };
    if input.is_empty() {
        return Err(err(0, "empty pattern"));
    }
    let mut atoms: Vec<PatternAtom> = Vec::new();
    let mut bonds: Vec<PatternBond> = Vec::new();
    let mut prev: Option<usize> = None;
    let mut branches: Vec<usize> = Vec::new();
    let mut pending: Option<BondConstraint> = None;
    let mut rings: HashMap<u32, RingOpening> = HashMap::new();
    let mut pos = 0;

    let add_bond = |bonds: &mut Vec<PatternBond>, a: usize, b: usize, c: BondConstraint, at: usize| {
        if a == b || bonds.iter().any(|x| (x.a == a && x.b == b) || (x.a == b && x.b == a)) {
            return Err(err(at, "duplicate or self bond"));
        }
        bonds.push(PatternBond { a, b, constraint: c });
        Ok(())
    };

    while pos < input.len() {
        let start = pos;
        let c = input[pos];
        match c {
            b'(' => {
                let Some(p) = prev.filter(|_| pending.is_none()) else {
                    return Err(err(start, "branch without atom"));
                };
                branches.push(p);
                pos += 1;
            }
            b')' => {
                if pending.is_some() || prev.is_none() {
                    return Err(err(start, "dangling bond"));
                }
                let Some(p) = branches.pop() else {
                    return Err(err(start, "unbalanced parenthesis"));
                };
                prev = Some(p);
                pos += 1;
            }
            b'-' | b'=' | b'#' | b':' | b'~' => {
                if prev.is_none() || pending.is_some() {
                    return Err(err(start, "dangling bond"));
                }
                pending = Some(match c {
                    b'-' => BondConstraint::Exactly(BondOrder::Single),
                    b'=' => BondConstraint::Exactly(BondOrder::Double),
                    b'#' => BondConstraint::Exactly(BondOrder::Triple),
                    b':' => BondConstraint::Exactly(BondOrder::Aromatic),
                    _ => BondConstraint::Any,
                });
                pos += 1;
            }
            b'.' => {
                if prev.is_none() || pending.is_some() || !branches.is_empty() {
                    return Err(err(start, "unexpected `.`"));
                }
                prev = None;
                pos += 1;
            }
            b'0'..=b'9' | b'%' => {
                let Some(atom) = prev else {
                    return Err(err(start, "ring closure without atom"));
                };
                let label = if c == b'%' {
                    match input.get(pos + 1..pos + 3) {
                        Some(d) if d.iter().all(u8::is_ascii_digit) => {
                            pos += 3;
                            u32::from(d[0] - b'0') * 10 + u32::from(d[1] - b'0')
                        }
                        _ => return Err(err(start, "bad `%` ring label")),
                    }
                } else {
                    pos += 1;
                    u32::from(c - b'0')
                };
                let constraint = pending.take();
                match rings.remove(&label) {
                    None => {
                        rings.insert(label, RingOpening { atom, constraint });
                    }
                    Some(open) => {
                        let c = match (open.constraint, constraint) {
                            (Some(x), Some(y)) if x != y => return Err(err(start, "ring bond constraints disagree")),
                            (Some(x), _) | (None, Some(x)) => x,
                            (None, None) => BondConstraint::Unspecified,
                        };
                        add_bond(&mut bonds, open.atom, atom, c, start)?;
                    }
                }
            }
            _ => {
                let (atom, len) = if c == b'[' {
                    parse_bracket(&input[pos..]).map_err(|(o, m)| err(pos + o, m))?
                } else {
                    parse_bare(&input[pos..]).map_err(|(o, m)| err(pos + o, m))?
                };
                pos += len;
                let index = atoms.len();
                atoms.push(atom);
                if let Some(p) = prev {
                    let c = pending.take().unwrap_or(BondConstraint::Unspecified);
                    add_bond(&mut bonds, p, index, c, start)?;
                }
                prev = Some(index);
            }
        }
    }
    if pending.is_some() {
        return Err(err(input.len(), "dangling bond"));
    }
    if !branches.is_empty() {
        return Err(err(input.len(), "unbalanced parenthesis"));
    }
    if let Some(label) = rings.keys().min() {
        return Err(err(input.len(), &format!("ring closure {label} never closed")));
    }
    if prev.is_none() {
        return Err(err(input.len(), "pattern ends without an atom"));
    }
    Ok(PatternGraph::new(atoms, bonds))
}

fn parse_bare(input: &[u8]) -> Result<(PatternAtom, usize), (usize, &'static str)> {
    let mut atom = PatternAtom::default();
    let next = input.get(1).copied();
    let (element, aromatic, len) = match (input[0], next) {
        (b'*', _) => return Ok((atom, 1)),
        (b'A', _) => {
            atom.aromatic = Some(false);
            return Ok((atom, 1));
        }
        (b'a', _) => {
            atom.aromatic = Some(true);
            return Ok((atom, 1));
        }
        (b'C', Some(b'l')) => (Element::Cl, false, 2),
        (b'B', Some(b'r')) => (Element::Br, false, 2),
        (b'C', _) => (Element::C, false, 1),
        (b'N', _) => (Element::N, false, 1),
        (b'O', _) => (Element::O, false, 1),
        (b'P', _) => (Element::P, false, 1),
        (b'S', _) => (Element::S, false, 1),
        (b'F', _) => (Element::F, false, 1),
        (b'I', _) => (Element::I, false, 1),
        (b'c', _) => (Element::C, true, 1),
        (b'n', _) => (Element::N, true, 1),
        (b'o', _) => (Element::O, true, 1),
        (b'p', _) => (Element::P, true, 1),
        (b's', _) => (Element::S, true, 1),
        (b'@' | b'/' | b'\\', _) => return Err((0, "stereochemistry is not supported")),
        _ => return Err((0, "unknown atom")),
    };
    atom.element = Some(element);
    atom.aromatic = Some(aromatic);
    Ok((atom, len))
}

fn read_number(input: &[u8], pos: &mut usize) -> Option<u32> {
    let start = *pos;
    while *pos < input.len() && input[*pos].is_ascii_digit() && *pos - start < 6 {
        *pos += 1;
    }
    if *pos == start {
        return None;
    }
    std::str::from_utf8(&input[start..*pos]).ok()?.parse().ok()
}

/// Parses `[...]` starting at `input[0] == b'['`; returns the atom and the
/// number of bytes consumed.
fn parse_bracket(input: &[u8]) -> Result<(PatternAtom, usize), (usize, &'static str)> {
    let mut atom = PatternAtom::default();
    let mut pos = 1;
    let set_element = |atom: &mut PatternAtom, e: Element, aromatic: Option<bool>, at: usize| {
        if atom.element.is_some() {
            return Err((at, "more than one element primitive"));
        }
        atom.element = Some(e);
        if aromatic.is_some() {
            atom.aromatic = aromatic;
        }
        Ok(())
    };
    // a leading `H` not followed by a count is the hydrogen element
    if input.get(1) == Some(&b'H') && matches!(input.get(2), Some(b']' | b':' | b'+' | b'-' | b'&' | b';')) {
        atom.element = Some(Element::H);
        atom.aromatic = Some(false);
        pos = 2;
    }
    loop {
        let Some(&c) = input.get(pos) else {
            return Err((0, "missing `]`"));
        };
        let at = pos;
        match c {
            b']' => return Ok((atom, pos + 1)),
            b'&' | b';' => pos += 1,
            b'*' => pos += 1,
            b'#' => {
                pos += 1;
                let z = read_number(input, &mut pos).ok_or((at, "expected atomic number"))?;
                let e = u8::try_from(z)
                    .ok()
                    .and_then(Element::from_atomic_number)
                    .ok_or((at, "unsupported atomic number"))?;
                set_element(&mut atom, e, None, at)?;
            }
            b'H' => {
                pos += 1;
                let h = read_number(input, &mut pos).unwrap_or(1);
                atom.hydrogens = Some(u8::try_from(h).map_err(|_| (at, "hydrogen count too large"))?);
            }
            b'D' => {
                pos += 1;
                let d = read_number(input, &mut pos).unwrap_or(1);
                atom.degree = Some(u8::try_from(d).map_err(|_| (at, "degree too large"))?);
            }
            b'+' | b'-' => {
                let unit: i32 = if c == b'+' { 1 } else { -1 };
                pos += 1;
                let magnitude = match read_number(input, &mut pos) {
                    Some(n) => n as i32,
                    None => {
                        let mut n = 1;
                        while input.get(pos) == Some(&c) {
                            n += 1;
                            pos += 1;
                        }
                        n
                    }
                };
                if magnitude > 4 {
                    return Err((at, "charge out of range"));
                }
                atom.charge = Some((unit * magnitude) as i8);
            }
            b':' => {
                pos += 1;
                match read_number(input, &mut pos) {
                    Some(n) if n > 0 => atom.map_index = Some(n),
                    _ => return Err((at, "bad atom map index")),
                }
                if input.get(pos) != Some(&b']') {
                    return Err((pos, "atom map must close the bracket"));
                }
            }
            b'a' => {
                atom.aromatic = Some(true);
                pos += 1;
            }
            b'A' => {
                atom.aromatic = Some(false);
                pos += 1;
            }
            b'c' | b'n' | b'o' | b'p' | b's' => {
                let e = match c {
                    b'c' => Element::C,
                    b'n' => Element::N,
                    b'o' => Element::O,
                    b'p' => Element::P,
                    _ => Element::S,
                };
                set_element(&mut atom, e, Some(true), at)?;
                pos += 1;
            }
            b'C' | b'N' | b'O' | b'P' | b'S' | b'F' | b'I' | b'B' => {
                let two = input
                    .get(pos..pos + 2)
                    .and_then(|s| std::str::from_utf8(s).ok())
                    .and_then(Element::from_symbol)
                    .filter(|e| e.symbol().len() == 2);
                let (e, len) = match two {
                    Some(e) => (e, 2),
                    None => {
                        let one = std::str::from_utf8(&input[pos..pos + 1]).expect("ascii");
                        (Element::from_symbol(one).ok_or((at, "unknown element"))?, 1)
                    }
                };
                set_element(&mut atom, e, Some(false), at)?;
                pos += len;
            }
            b'!' | b',' | b'$' | b'@' | b'R' | b'r' | b'X' | b'x' | b'v' => {
                return Err((at, "unsupported SMARTS primitive"))
            }
            b'0'..=b'9' => return Err((at, "isotopes are not supported")),
            _ => return Err((at, "unexpected character in bracket atom")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_primitives() {
        let p = parse_smarts("[CH3:1][O-:2]", 0).unwrap();
        assert_eq!(p.atom_count(), 2);
        assert_eq!(p.atoms()[0].element, Some(Element::C));
        assert_eq!(p.atoms()[0].aromatic, Some(false));
        assert_eq!(p.atoms()[0].hydrogens, Some(3));
        assert_eq!(p.atoms()[0].map_index, Some(1));
        assert_eq!(p.atoms()[1].charge, Some(-1));
        assert_eq!(p.atoms()[1].hydrogens, None);
        let p = parse_smarts("[#6;H2;D3][#8&+0]", 0).unwrap();
        assert_eq!(p.atoms()[0].element, Some(Element::C));
        assert_eq!(p.atoms()[0].aromatic, None);
        assert_eq!(p.atoms()[0].degree, Some(3));
        assert_eq!(p.atoms()[1].charge, Some(0));
    }

    #[test]
    fn hydrogen_atoms_versus_counts() {
        let p = parse_smarts("[H:4][C:1]([H])[CH2]", 0).unwrap();
        assert_eq!(p.atoms()[0].element, Some(Element::H));
        assert_eq!(p.atoms()[0].map_index, Some(4));
        assert_eq!(p.atoms()[2].element, Some(Element::H));
        assert_eq!(p.atoms()[3].element, Some(Element::C));
        assert_eq!(p.atoms()[3].hydrogens, Some(2));
        assert!(p.has_explicit_hydrogens());
    }

    #[test]
    fn bonds_and_wildcards() {
        let p = parse_smarts("*~C=C#N.c:c", 0).unwrap();
        assert!(p.atoms()[0].is_wildcard());
        let constraints: Vec<_> = p.bonds().iter().map(|b| b.constraint).collect();
        assert_eq!(
            constraints,
            vec![
                BondConstraint::Any,
                BondConstraint::Exactly(BondOrder::Double),
                BondConstraint::Exactly(BondOrder::Triple),
                BondConstraint::Exactly(BondOrder::Aromatic),
            ]
        );
        assert!(BondConstraint::Unspecified.matches(BondOrder::Aromatic));
        assert!(!BondConstraint::Unspecified.matches(BondOrder::Double));
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        assert_eq!(parse_smarts("C[C,N]", 10).unwrap_err().offset, 13);
        assert_eq!(parse_smarts("CC(", 0).unwrap_err().message, "unbalanced parenthesis");
        assert!(parse_smarts("C[C:1", 0).is_err());
        assert!(parse_smarts("C1CC", 0).is_err());
        assert!(parse_smarts("[CC]", 0).is_err());
        assert!(parse_smarts("", 0).is_err());
        assert!(parse_smarts("[!C]", 0).is_err());
    }
}
