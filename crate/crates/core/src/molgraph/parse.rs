use std::collections::HashMap;

use thiserror::Error;

use super::rings::ring_atoms;
use super::{Atom, Bond, BondOrder, Element, MolecularGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmilesErrorKind {
    #[error("input is empty")]
    EmptyInput,
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("malformed bracket atom: {0}")]
    MalformedBracketAtom(&'static str),
    #[error("ring closure {0} is never closed")]
    UnbalancedRingClosure(u32),
    #[error("ring closure bond orders disagree")]
    RingBondMismatch,
    #[error("unbalanced parenthesis")]
    UnbalancedParenthesis,
    #[error("bond or branch without a preceding atom")]
    DanglingBond,
    #[error("unexpected character `{0}`")]
    UnexpectedCharacter(char),
    #[error("unsupported feature: {0}")]
    Unsupported(&'static str),
    #[error("ring closure joins an atom to itself")]
    SelfBond,
    #[error("atoms are already bonded")]
    DuplicateBond,
    #[error("aromatic atom outside of a ring")]
    AromaticOutsideRing,
    #[error("atom exceeds its maximum valence")]
    ValenceExceeded,
}

/// A SMILES syntax or chemistry error with the byte offset it refers to.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte {offset}")]
pub struct SmilesError {
    pub offset: usize,
    pub kind: SmilesErrorKind,
}

impl SmilesError {
    fn new(offset: usize, kind: SmilesErrorKind) -> Self {
        SmilesError { offset, kind }
    }
}

struct RingOpening {
    atom: usize,
    order: Option<BondOrder>,
    offset: usize,
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
    atoms: Vec<Atom>,
    bracket: Vec<bool>,
    offsets: Vec<usize>,
    bonds: Vec<Bond>,
    prev: Option<usize>,
    branches: Vec<(usize, usize)>,
    pending: Option<(BondOrder, usize)>,
    rings: HashMap<u32, RingOpening>,
}

/// Parses a SMILES string into a molecular graph.
///
/// Organic-subset atoms receive implicit hydrogens from the valence table;
/// bracket atoms carry exactly the hydrogens written.
pub fn parse_smiles(input: &str) -> Result<MolecularGraph, SmilesError> {
    if input.is_empty() {
        return Err(SmilesError::new(0, SmilesErrorKind::EmptyInput));
    }
    let mut parser = Parser {
        input: input.as_bytes(),
        pos: 0,
        atoms: Vec::new(),
        bracket: Vec::new(),
        offsets: Vec::new(),
        bonds: Vec::new(),
        prev: None,
        branches: Vec::new(),
        pending: None,
        rings: HashMap::new(),
    };
    parser.run()?;
    parser.finish()
}

impl Parser<'_> {
    fn err<T>(&self, offset: usize, kind: SmilesErrorKind) -> Result<T, SmilesError> {
        Err(SmilesError::new(offset, kind))
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn run(&mut self) -> Result<(), SmilesError> {
        while let Some(c) = self.peek() {
            let start = self.pos;
            match c {
                b'(' => {
                    let Some(prev) = self.prev else {
                        return self.err(start, SmilesErrorKind::DanglingBond);
                    };
                    if self.pending.is_some() {
                        return self.err(start, SmilesErrorKind::DanglingBond);
                    }
                    self.branches.push((prev, start));
                    self.pos += 1;
                }
                b')' => {
                    if self.pending.is_some() {
                        return self.err(start, SmilesErrorKind::DanglingBond);
                    }
                    let Some((atom, _)) = self.branches.pop() else {
                        return self.err(start, SmilesErrorKind::UnbalancedParenthesis);
                    };
                    if self.prev.is_none() {
                        return self.err(start, SmilesErrorKind::DanglingBond);
                    }
                    self.prev = Some(atom);
                    self.pos += 1;
                }
                b'-' | b'=' | b'#' | b':' => {
                    if self.prev.is_none() || self.pending.is_some() {
                        return self.err(start, SmilesErrorKind::DanglingBond);
                    }
                    let order = match c {
                        b'-' => BondOrder::Single,
                        b'=' => BondOrder::Double,
                        b'#' => BondOrder::Triple,
                        _ => BondOrder::Aromatic,
                    };
                    self.pending = Some((order, start));
                    self.pos += 1;
                }
                b'0'..=b'9' | b'%' => self.ring_closure()?,
                b'.' => {
                    if self.prev.is_none() || self.pending.is_some() || !self.branches.is_empty() {
                        return self.err(start, SmilesErrorKind::UnexpectedCharacter('.'));
                    }
                    self.prev = None;
                    self.pos += 1;
                }
                b'[' => {
                    let atom = self.bracket_atom()?;
                    self.push_atom(atom, true, start)?;
                }
                b'@' | b'/' | b'\\' => return self.err(start, SmilesErrorKind::Unsupported("stereochemistry")),
                b'*' => return self.err(start, SmilesErrorKind::Unsupported("wildcard atom")),
                c if c.is_ascii_alphabetic() => {
                    let atom = self.organic_atom()?;
                    self.push_atom(atom, false, start)?;
                }
                other => return self.err(start, SmilesErrorKind::UnexpectedCharacter(char::from(other))),
            }
        }
        Ok(())
    }

    fn organic_atom(&mut self) -> Result<Atom, SmilesError> {
        let start = self.pos;
        let c = self.input[start];
        let next = self.input.get(start + 1).copied();
        let (element, aromatic, len) = match (c, next) {
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
            _ => {
                let end = if next.is_some_and(|n| n.is_ascii_lowercase()) && c.is_ascii_uppercase() {
                    start + 2
                } else {
                    start + 1
                };
                let symbol = String::from_utf8_lossy(&self.input[start..end]).into_owned();
                return self.err(start, SmilesErrorKind::UnknownElement(symbol));
            }
        };
        self.pos += len;
        let mut atom = Atom::new(element);
        atom.aromatic = aromatic;
        Ok(atom)
    }

    fn number(&mut self) -> Option<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) && self.pos - start < 9 {
            self.pos += 1;
        }
        if self.pos == start {
            return None;
        }
        std::str::from_utf8(&self.input[start..self.pos]).ok()?.parse().ok()
    }

    fn bracket_atom(&mut self) -> Result<Atom, SmilesError> {
        let start = self.pos;
        self.pos += 1;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            return self.err(self.pos, SmilesErrorKind::Unsupported("isotope"));
        }
        let sym_start = self.pos;
        let (element, aromatic) = match self.peek() {
            Some(c) if c.is_ascii_uppercase() => {
                let two = self
                    .input
                    .get(self.pos..self.pos + 2)
                    .and_then(|s| std::str::from_utf8(s).ok())
                    .and_then(Element::from_symbol);
                if let Some(e) = two.filter(|e| e.symbol().len() == 2) {
                    self.pos += 2;
                    (e, false)
                } else if self.input.get(self.pos + 1).is_some_and(|c| c.is_ascii_lowercase()) {
                    let symbol = String::from_utf8_lossy(&self.input[sym_start..sym_start + 2]).into_owned();
                    return self.err(sym_start, SmilesErrorKind::UnknownElement(symbol));
                } else {
                    let one = std::str::from_utf8(&self.input[self.pos..self.pos + 1]).unwrap();
                    match Element::from_symbol(one) {
                        Some(e) => {
                            self.pos += 1;
                            (e, false)
                        }
                        None => {
                            let mut end = self.pos + 1;
                            if self.input.get(end).is_some_and(|c| c.is_ascii_lowercase()) {
                                end += 1;
                            }
                            let symbol = String::from_utf8_lossy(&self.input[sym_start..end]).into_owned();
                            return self.err(sym_start, SmilesErrorKind::UnknownElement(symbol));
                        }
                    }
                }
            }
            Some(c) if c.is_ascii_lowercase() => {
                let e = match c {
                    b'c' => Element::C,
                    b'n' => Element::N,
                    b'o' => Element::O,
                    b'p' => Element::P,
                    b's' => Element::S,
                    _ => {
                        let symbol = char::from(c).to_string();
                        return self.err(sym_start, SmilesErrorKind::UnknownElement(symbol));
                    }
                };
                self.pos += 1;
                (e, true)
            }
            Some(b'*') => return self.err(sym_start, SmilesErrorKind::Unsupported("wildcard atom")),
            _ => return self.err(sym_start, SmilesErrorKind::MalformedBracketAtom("missing element")),
        };
        let mut atom = Atom::new(element);
        atom.aromatic = aromatic;
        if self.peek() == Some(b'@') {
            return self.err(self.pos, SmilesErrorKind::Unsupported("stereochemistry"));
        }
        if self.peek() == Some(b'H') {
            self.pos += 1;
            let count = self.number().unwrap_or(1);
            if count > 8 {
                return self.err(self.pos, SmilesErrorKind::MalformedBracketAtom("hydrogen count"));
            }
            atom.hydrogens = count as u8;
        }
        if let Some(sign @ (b'+' | b'-')) = self.peek() {
            let unit: i32 = if sign == b'+' { 1 } else { -1 };
            self.pos += 1;
            let magnitude = if let Some(n) = self.number() {
                n as i32
            } else {
                let mut n = 1;
                while self.peek() == Some(sign) {
                    n += 1;
                    self.pos += 1;
                }
                n
            };
            if magnitude > 4 {
                return self.err(self.pos, SmilesErrorKind::MalformedBracketAtom("charge"));
            }
            atom.charge = (unit * magnitude) as i8;
        }
        if self.peek() == Some(b':') {
            self.pos += 1;
            match self.number() {
                Some(n) if n > 0 => atom.map_index = Some(n),
                _ => return self.err(self.pos, SmilesErrorKind::MalformedBracketAtom("atom map index")),
            }
        }
        match self.peek() {
            Some(b']') => {
                self.pos += 1;
                Ok(atom)
            }
            None => self.err(start, SmilesErrorKind::MalformedBracketAtom("missing `]`")),
            Some(_) => self.err(self.pos, SmilesErrorKind::MalformedBracketAtom("unexpected content")),
        }
    }

    fn implicit_order(&self, a: usize, b: usize) -> BondOrder {
        if self.atoms[a].aromatic && self.atoms[b].aromatic {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        }
    }

    fn add_bond(&mut self, a: usize, b: usize, order: BondOrder, offset: usize) -> Result<(), SmilesError> {
        if a == b {
            return self.err(offset, SmilesErrorKind::SelfBond);
        }
        if self.bonds.iter().any(|x| (x.a == a && x.b == b) || (x.a == b && x.b == a)) {
            return self.err(offset, SmilesErrorKind::DuplicateBond);
        }
        self.bonds.push(Bond::new(a, b, order));
        Ok(())
    }

    fn push_atom(&mut self, atom: Atom, bracket: bool, offset: usize) -> Result<(), SmilesError> {
        let index = self.atoms.len();
        self.atoms.push(atom);
        self.bracket.push(bracket);
        self.offsets.push(offset);
        if let Some(prev) = self.prev {
            let order = match self.pending.take() {
                Some((order, _)) => order,
                None => self.implicit_order(prev, index),
            };
            self.add_bond(prev, index, order, offset)?;
        }
        self.prev = Some(index);
        Ok(())
    }

    fn ring_closure(&mut self) -> Result<(), SmilesError> {
        let start = self.pos;
        let Some(atom) = self.prev else {
            return self.err(start, SmilesErrorKind::DanglingBond);
        };
        let label = if self.input[start] == b'%' {
            self.pos += 1;
            let digits = self.input.get(self.pos..self.pos + 2);
            match digits {
                Some(d) if d.iter().all(u8::is_ascii_digit) => {
                    self.pos += 2;
                    u32::from(d[0] - b'0') * 10 + u32::from(d[1] - b'0')
                }
                _ => return self.err(start, SmilesErrorKind::UnexpectedCharacter('%')),
            }
        } else {
            self.pos += 1;
            u32::from(self.input[start] - b'0')
        };
        let order = self.pending.take().map(|(o, _)| o);
        match self.rings.remove(&label) {
            None => {
                self.rings.insert(label, RingOpening { atom, order, offset: start });
            }
            Some(open) => {
                let order = match (open.order, order) {
                    (Some(a), Some(b)) if a != b => return self.err(start, SmilesErrorKind::RingBondMismatch),
                    (Some(a), _) | (None, Some(a)) => a,
                    (None, None) => self.implicit_order(open.atom, atom),
                };
                self.add_bond(open.atom, atom, order, start)?;
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<MolecularGraph, SmilesError> {
        let end = self.input.len();
        if let Some((_, offset)) = self.pending {
            return self.err(offset, SmilesErrorKind::DanglingBond);
        }
        if let Some(&(_, offset)) = self.branches.last() {
            return self.err(offset, SmilesErrorKind::UnbalancedParenthesis);
        }
        if let Some((&label, open)) = self.rings.iter().min_by_key(|(_, o)| o.offset) {
            return self.err(open.offset, SmilesErrorKind::UnbalancedRingClosure(label));
        }
        if self.atoms.is_empty() {
            return self.err(end, SmilesErrorKind::EmptyInput);
        }
        if self.prev.is_none() {
            // trailing '.'
            return self.err(end - 1, SmilesErrorKind::UnexpectedCharacter('.'));
        }
        let offsets = self.offsets;
        let bracket = self.bracket;
        let mut graph = MolecularGraph::new(self.atoms, self.bonds)
            .map_err(|_| SmilesError::new(0, SmilesErrorKind::DuplicateBond))?;
        let in_ring = ring_atoms(&graph);
        for i in 0..graph.atom_count() {
            if graph.atom(i).aromatic && !in_ring[i] {
                return Err(SmilesError::new(offsets[i], SmilesErrorKind::AromaticOutsideRing));
            }
        }
        let mut hydrogens = Vec::with_capacity(graph.atom_count());
        for i in 0..graph.atom_count() {
            if bracket[i] {
                if !graph.valence_ok(i, false) {
                    return Err(SmilesError::new(offsets[i], SmilesErrorKind::ValenceExceeded));
                }
                hydrogens.push(graph.atom(i).hydrogens);
            } else {
                match graph.default_hydrogens(i) {
                    Some(h) => hydrogens.push(h),
                    None => return Err(SmilesError::new(offsets[i], SmilesErrorKind::ValenceExceeded)),
                }
            }
        }
        let (mut atoms, bonds) = graph.into_parts();
        for (atom, h) in atoms.iter_mut().zip(hydrogens) {
            atom.hydrogens = h;
        }
        graph = MolecularGraph::new(atoms, bonds).expect("validated above");
        Ok(graph)
    }
}
