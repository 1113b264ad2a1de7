//! Chemistry core for the retrokit retrobiosynthesis engine.
//!
//! * [`molgraph`]: SMILES parsing, writing, canonical keys and hydrogen handling.
//! * [`pattern`]: SMARTS-subset patterns, substructure matching and reaction
//!   template application.
//! * [`fingerprint`]: circular (Morgan/ECFP-style) fingerprints, reaction
//!   features and Tanimoto/Tversky similarity.

pub mod fingerprint;
pub mod molgraph;
pub mod pattern;

pub use fingerprint::{Fingerprint, ReactionFeature};
pub use molgraph::{Atom, Bond, BondOrder, CanonicalSmiles, Element, MolecularGraph};
pub use pattern::{CandidatePrecursor, MatchMapping, PatternGraph, ReactionTemplate};
