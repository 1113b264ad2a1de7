//! SMARTS-subset patterns, substructure search and reaction templates.
//!
//! Atom primitives: element symbol (upper case aliphatic, lower case
//! aromatic), `#n`, `*`, `a`, `A`, `Hn`, `Dn`, charge and `:map`, combined
//! with `&` or `;`. Bonds: `-`, `=`, `#`, `:`, `~`; an unwritten bond matches
//! single or aromatic. Comma lists, negation, recursion and ring queries are
//! rejected.

mod enumerate;
mod matcher;
mod smarts;
mod template;
mod tsv;

pub use enumerate::{enumerate_precursors, join_keys, main_component, CandidatePrecursor, Provenance};
pub use matcher::{find_matches, MatchMapping};
pub use smarts::{parse_smarts, BondConstraint, PatternAtom, PatternBond, PatternGraph, SmartsSyntaxError};
pub use template::{
    apply_template, apply_template_report, parse_smarts_template, ApplyError, ApplyReport, Direction, ReactionTemplate,
    Side, TemplateError, TemplateOutcome,
};
pub use tsv::{parse_template_tsv, write_template_tsv, TemplateFileError};
