use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::molgraph::{
    add_explicit_hydrogens, canonicalize, parse_smiles, ring_atoms, strip_explicit_hydrogens, Atom, Bond, BondOrder,
    CanonicalSmiles, MolecularGraph,
};

use super::matcher::{find_matches, MatchMapping};
use super::smarts::{parse_smarts, BondConstraint, PatternGraph, SmartsSyntaxError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn code(self) -> &'static str {
        match self {
            Direction::Forward => "fwd",
            Direction::Backward => "bwd",
        }
    }

    pub fn from_code(code: &str) -> Option<Direction> {
        match code {
            "fwd" => Some(Direction::Forward),
            "bwd" => Some(Direction::Backward),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("template has no `>>` separator")]
    MissingArrow,
    #[error("template has more than one `>>` separator")]
    ExtraArrow,
    #[error("map index {map} appears more than once on the {side} side")]
    DuplicateMapIndexOnSide { map: u32, side: Side },
    #[error("map index {map} appears only on the {side} side")]
    UnmappedRewriteReference { map: u32, side: Side },
    #[error("created atom {atom} has no element")]
    UnderspecifiedCreatedAtom { atom: usize },
    #[error(transparent)]
    Syntax(#[from] SmartsSyntaxError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("template {template_id:?} deleted every atom of the target")]
    RewriteProducedEmptyGraph { template_id: String },
}

/// A reaction SMARTS: `lhs` is matched, `rhs` describes the result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReactionTemplate {
    pub template_id: String,
    pub direction: Direction,
    pub diameter: u32,
    pub ec_numbers: Vec<String>,
    pub lhs: PatternGraph,
    pub rhs: PatternGraph,
    /// `(lhs atom, rhs atom)` pairs ordered by map index.
    pub mapping: Vec<(usize, usize)>,
    smarts: String,
}

impl ReactionTemplate {
    /// Parses `lhs>>rhs`. The result is a backward template with empty
    /// metadata; use the builder methods to fill it in.
    pub fn parse(text: &str) -> Result<Self, TemplateError> {
        let Some(arrow) = text.find(">>") else {
            return Err(TemplateError::MissingArrow);
        };
        if text[arrow + 2..].contains(">>") {
            return Err(TemplateError::ExtraArrow);
        }
        let lhs = parse_smarts(&text[..arrow], 0)?;
        // an empty right side deletes everything that matched
        let rhs = match &text[arrow + 2..] {
            "" => PatternGraph::new(Vec::new(), Vec::new()),
            right => parse_smarts(right, arrow + 2)?,
        };
        let mapping = build_mapping(&lhs, &rhs)?;
        let template = ReactionTemplate {
            template_id: String::new(),
            direction: Direction::Backward,
            diameter: 0,
            ec_numbers: Vec::new(),
            lhs,
            rhs,
            mapping,
            smarts: text.to_string(),
        };
        template.check_created_atoms()?;
        Ok(template)
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.template_id = id.into();
        self
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn with_diameter(mut self, diameter: u32) -> Self {
        self.diameter = diameter;
        self
    }

    pub fn with_ec_numbers(mut self, ec: Vec<String>) -> Self {
        self.ec_numbers = ec;
        self
    }

    /// The template text as written.
    pub fn smarts(&self) -> &str {
        &self.smarts
    }

    /// A backward version: forward templates have their sides swapped.
    pub fn to_backward(&self) -> Result<ReactionTemplate, TemplateError> {
        if self.direction == Direction::Backward {
            return Ok(self.clone());
        }
        let (left, right) = self.smarts.split_once(">>").expect("parsed templates have an arrow");
        let swapped = ReactionTemplate {
            template_id: self.template_id.clone(),
            direction: Direction::Backward,
            diameter: self.diameter,
            ec_numbers: self.ec_numbers.clone(),
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
            mapping: self.mapping.iter().map(|&(l, r)| (r, l)).collect(),
            smarts: format!("{right}>>{left}"),
        };
        swapped.check_created_atoms()?;
        Ok(swapped)
    }

    /// Templates with hydrogen atoms are applied to hydrogen-explicit targets.
    pub fn uses_explicit_hydrogens(&self) -> bool {
        self.lhs.has_explicit_hydrogens() || self.rhs.has_explicit_hydrogens()
    }

    fn check_created_atoms(&self) -> Result<(), TemplateError> {
        let mapped: BTreeSet<usize> = self.mapping.iter().map(|&(_, r)| r).collect();
        for (i, atom) in self.rhs.atoms().iter().enumerate() {
            if !mapped.contains(&i) && atom.element.is_none() {
                return Err(TemplateError::UnderspecifiedCreatedAtom { atom: i });
            }
        }
        Ok(())
    }
}

/// Parses a reaction SMARTS into a backward template.
pub fn parse_smarts_template(text: &str) -> Result<ReactionTemplate, TemplateError> {
    ReactionTemplate::parse(text)
}

fn side_maps(graph: &PatternGraph, side: Side) -> Result<BTreeMap<u32, usize>, TemplateError> {
    let mut maps = BTreeMap::new();
    for (i, atom) in graph.atoms().iter().enumerate() {
        if let Some(map) = atom.map_index {
            if maps.insert(map, i).is_some() {
                return Err(TemplateError::DuplicateMapIndexOnSide { map, side });
            }
        }
    }
    Ok(maps)
}

fn build_mapping(lhs: &PatternGraph, rhs: &PatternGraph) -> Result<Vec<(usize, usize)>, TemplateError> {
    let left = side_maps(lhs, Side::Left)?;
    let right = side_maps(rhs, Side::Right)?;
    if let Some(&map) = right.keys().find(|m| !left.contains_key(m)) {
        return Err(TemplateError::UnmappedRewriteReference { map, side: Side::Right });
    }
    // a map index only on the left marks an atom the rewrite deletes
    Ok(left.iter().filter_map(|(m, &l)| right.get(m).map(|&r| (l, r))).collect())
}

/// One distinct result of applying a template: the precursor molecules and
/// their canonical keys (sorted), plus the first match that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateOutcome {
    pub precursors: Vec<MolecularGraph>,
    pub keys: Vec<CanonicalSmiles>,
    pub mapping: MatchMapping,
}

/// Outcomes together with the pre-dedup match count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApplyReport {
    pub outcomes: Vec<TemplateOutcome>,
    pub raw_matches: usize,
    pub rejected: usize,
}

/// Applies `template` (lhs matched against `target`) and returns distinct
/// sanitized precursor sets in match order.
pub fn apply_template(
    template: &ReactionTemplate,
    target: &MolecularGraph,
) -> Result<Vec<TemplateOutcome>, ApplyError> {
    apply_template_report(template, target).map(|r| r.outcomes)
}

pub fn apply_template_report(template: &ReactionTemplate, target: &MolecularGraph) -> Result<ApplyReport, ApplyError> {
    let explicit = template.uses_explicit_hydrogens();
    let work = if explicit {
        match add_explicit_hydrogens(target) {
            Ok(g) => g,
            Err(_) => return Ok(ApplyReport { outcomes: Vec::new(), raw_matches: 0, rejected: 0 }),
        }
    } else {
        target.clone()
    };
    let matches = find_matches(&template.lhs, &work);
    let raw_matches = matches.len();
    let mut seen: BTreeSet<Vec<CanonicalSmiles>> = BTreeSet::new();
    let mut outcomes = Vec::new();
    let mut rejected = 0;
    let rewriter = Rewriter::new(template, explicit);
    for m in matches {
        match rewriter.rewrite(&work, &m)? {
            Some((precursors, keys)) => {
                if seen.insert(keys.clone()) {
                    outcomes.push(TemplateOutcome { precursors, keys, mapping: m });
                }
            }
            None => rejected += 1,
        }
    }
    Ok(ApplyReport { outcomes, raw_matches, rejected })
}

struct Rewriter<'a> {
    template: &'a ReactionTemplate,
    explicit: bool,
    /// rhs partner of each lhs atom
    rhs_of: Vec<Option<usize>>,
    /// lhs partner of each rhs atom
    lhs_of: Vec<Option<usize>>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Sanitized precursor graphs and their canonical keys.
type Rewritten = (Vec<MolecularGraph>, Vec<CanonicalSmiles>);

impl<'a> Rewriter<'a> {
    fn new(template: &'a ReactionTemplate, explicit: bool) -> Self {
        let mut rhs_of = vec![None; template.lhs.atom_count()];
        let mut lhs_of = vec![None; template.rhs.atom_count()];
        for &(l, r) in &template.mapping {
            rhs_of[l] = Some(r);
            lhs_of[r] = Some(l);
        }
        Rewriter { template, explicit, rhs_of, lhs_of }
    }

    /// `Ok(None)` means the result failed sanitization.
    fn rewrite(&self, work: &MolecularGraph, m: &MatchMapping) -> Result<Option<Rewritten>, ApplyError> {
        let lhs = &self.template.lhs;
        let rhs = &self.template.rhs;
        let mut atoms: Vec<Atom> = work.atoms().to_vec();
        let mut alive = vec![true; atoms.len()];
        let mut touched = vec![false; atoms.len()];
        let mut fixed_h = vec![false; atoms.len()];
        let mut bonds: BTreeMap<(usize, usize), BondOrder> =
            work.bonds().iter().map(|b| (key(b.a, b.b), b.order)).collect();

        for (p, &t) in m.assignment.iter().enumerate() {
            touched[t] = true;
            match self.rhs_of[p] {
                None => {
                    alive[t] = false;
                    for &(n, _) in work.neighbors(t) {
                        touched[n] = true;
                    }
                }
                Some(r) => {
                    let spec = &rhs.atoms()[r];
                    let atom = &mut atoms[t];
                    if let Some(e) = spec.element {
                        atom.element = e;
                    }
                    if let Some(a) = spec.aromatic {
                        atom.aromatic = a;
                    }
                    if let Some(q) = spec.charge {
                        atom.charge = q;
                    }
                    if let (Some(h), false) = (spec.hydrogens, self.explicit) {
                        atom.hydrogens = h;
                        fixed_h[t] = true;
                    }
                }
            }
        }

        for bond in lhs.bonds() {
            let (ta, tb) = (m.assignment[bond.a], m.assignment[bond.b]);
            let (Some(ra), Some(rb)) = (self.rhs_of[bond.a], self.rhs_of[bond.b]) else {
                continue;
            };
            match rhs.bond_between(ra, rb) {
                Some(rbond) => match (bond.constraint, rbond.constraint) {
                    (_, BondConstraint::Exactly(order)) => {
                        bonds.insert(key(ta, tb), order);
                    }
                    // an explicit order on the left rewritten to a plain bond
                    (BondConstraint::Exactly(_), BondConstraint::Unspecified) => {
                        let order = if atoms[ta].aromatic && atoms[tb].aromatic {
                            BondOrder::Aromatic
                        } else {
                            BondOrder::Single
                        };
                        bonds.insert(key(ta, tb), order);
                    }
                    _ => {}
                },
                None => {
                    bonds.remove(&key(ta, tb));
                }
            }
        }

        // created atoms, then rhs bonds absent from lhs
        let mut image: Vec<usize> = Vec::with_capacity(rhs.atom_count());
        for (r, spec) in rhs.atoms().iter().enumerate() {
            match self.lhs_of[r] {
                Some(p) => image.push(m.assignment[p]),
                None => {
                    let mut atom = Atom::new(spec.element.expect("created atoms have an element"));
                    atom.aromatic = spec.aromatic.unwrap_or(false);
                    atom.charge = spec.charge.unwrap_or(0);
                    let has_h = spec.hydrogens.is_some() && !self.explicit;
                    atom.hydrogens = if has_h { spec.hydrogens.unwrap_or(0) } else { 0 };
                    image.push(atoms.len());
                    atoms.push(atom);
                    alive.push(true);
                    touched.push(true);
                    fixed_h.push(has_h);
                }
            }
        }
        for rbond in rhs.bonds() {
            let existing_in_lhs = match (self.lhs_of[rbond.a], self.lhs_of[rbond.b]) {
                (Some(pa), Some(pb)) => lhs.bond_between(pa, pb).is_some(),
                _ => false,
            };
            if existing_in_lhs {
                continue;
            }
            let (ta, tb) = (image[rbond.a], image[rbond.b]);
            if bonds.contains_key(&key(ta, tb)) {
                // would duplicate a bond the pattern did not mention
                return Ok(None);
            }
            let order = match rbond.constraint {
                BondConstraint::Exactly(o) => o,
                _ if atoms[ta].aromatic && atoms[tb].aromatic => BondOrder::Aromatic,
                _ => BondOrder::Single,
            };
            bonds.insert(key(ta, tb), order);
        }

        let mut index = vec![usize::MAX; atoms.len()];
        let mut kept_atoms = Vec::new();
        let mut kept_touched = Vec::new();
        let mut kept_fixed = Vec::new();
        for (i, atom) in atoms.into_iter().enumerate() {
            if alive[i] {
                index[i] = kept_atoms.len();
                kept_atoms.push(atom);
                kept_touched.push(touched[i]);
                kept_fixed.push(fixed_h[i]);
            }
        }
        if kept_atoms.is_empty() {
            return Err(ApplyError::RewriteProducedEmptyGraph { template_id: self.template.template_id.clone() });
        }
        let kept_bonds: Vec<Bond> = bonds
            .iter()
            .filter(|(&(a, b), _)| alive[a] && alive[b])
            .map(|(&(a, b), &order)| Bond::new(index[a], index[b], order))
            .collect();
        let Ok(mut graph) = MolecularGraph::new(kept_atoms, kept_bonds) else {
            return Ok(None);
        };

        if !self.explicit {
            let (mut atoms, bonds) = graph.clone().into_parts();
            for i in 0..atoms.len() {
                if kept_touched[i] && !kept_fixed[i] {
                    match graph.default_hydrogens(i) {
                        Some(h) => atoms[i].hydrogens = h,
                        None => return Ok(None),
                    }
                }
            }
            graph = match MolecularGraph::new(atoms, bonds) {
                Ok(g) => g,
                Err(_) => return Ok(None),
            };
        }
        if !sanitized(&graph, &kept_touched) {
            return Ok(None);
        }
        let graph = if self.explicit { strip_explicit_hydrogens(&graph) } else { graph };
        let mut parts: Vec<(CanonicalSmiles, MolecularGraph)> = Vec::new();
        for component in graph.split_components() {
            let canonical = canonicalize(&component);
            if parse_smiles(canonical.as_str()).is_err() {
                return Ok(None);
            }
            parts.push((canonical, component));
        }
        parts.sort_by(|a, b| a.0.cmp(&b.0));
        let (keys, precursors) = parts.into_iter().unzip();
        Ok(Some((precursors, keys)))
    }
}

/// Valence and aromaticity sanity: no atom over its maximum valence, every
/// rewritten atom at an allowed valence, aromatic flags only on ring atoms.
fn sanitized(graph: &MolecularGraph, touched: &[bool]) -> bool {
    let in_ring = ring_atoms(graph);
    (0..graph.atom_count()).all(|i| {
        let atom = graph.atom(i);
        graph.valence_ok(i, touched[i]) && (!atom.aromatic || (in_ring[i] && atom.element.can_be_aromatic()))
    })
}
