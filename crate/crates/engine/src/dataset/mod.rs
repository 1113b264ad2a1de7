//! Reaction corpora: ingestion, cleaning and labeled dataset construction.

mod augment;
mod clean;
mod fetch;
mod pairs;
mod split;
mod tsv;

use std::collections::BTreeMap;

use serde::Serialize;

use retrokit_core::CanonicalSmiles;

pub use augment::{augment_negatives, strict_check_violations, Augmentation};
pub use clean::{
    build_compound_table, clean_compound, clean_reactions, split_mono_product, CleanError, CleanedCompound,
    CompoundEntry, CompoundTable, Replacement,
};
pub use fetch::{CompoundFetcher, FetchConfig, FetchError};
pub use pairs::{chains_from_pathways, make_pathway_pairs, one_step_rows, TwoStepChain};
pub use split::{split_train_test, subsample_negatives, SplitError};
pub use tsv::{
    parse_compound_tsv, parse_dataset_tsv, parse_mono_tsv, parse_pathway_tsv, parse_reaction_tsv, write_compound_tsv,
    write_dataset_tsv, write_mono_tsv, write_reaction_tsv, DatasetFileError,
};

/// Where a record came from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Assembled,
    Augmented { template_id: String },
}

/// A reaction as read from a corpus file: compound ids or SMILES per side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawReaction {
    pub reaction_id: String,
    pub ec_numbers: Vec<String>,
    pub reactants: Vec<String>,
    pub products: Vec<String>,
}

/// A cleaned reaction. Both sides are sorted multisets of canonical keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReactionRecord {
    pub reaction_id: String,
    pub ec_numbers: Vec<String>,
    pub reactants: Vec<CanonicalSmiles>,
    pub products: Vec<CanonicalSmiles>,
    pub origin: Origin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

/// A reaction with exactly one product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoProductReaction {
    pub parent_id: String,
    pub ec_numbers: Vec<String>,
    pub reactants: Vec<CanonicalSmiles>,
    pub product: CanonicalSmiles,
    pub label: Label,
    pub origin: Origin,
    /// The product's fingerprint shares no bit with the reactants'.
    pub no_shared_bits: bool,
}

/// One labeled ranking example: a target and one (single step) or two
/// (two-step chain) precursor sets.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRow {
    pub label: bool,
    /// Positives and negatives that must stay on the same side of a split
    /// share this key; it is the target key.
    pub group_key: String,
    pub target: CanonicalSmiles,
    pub steps: Vec<Vec<CanonicalSmiles>>,
    pub weight: f64,
}

impl DatasetRow {
    /// Precursor sets as text: keys joined by `.`, steps joined by `>`.
    pub fn candidate_key(&self) -> String {
        self.steps.iter().map(|s| retrokit_core::pattern::join_keys(s)).collect::<Vec<_>>().join(">")
    }
}

/// Counters collected while assembling a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub reactions_in: usize,
    pub reactions_usable: usize,
    /// Broken reactions plus duplicates merged into an earlier record.
    pub reactions_dropped: usize,
    pub reactions_broken: usize,
    pub duplicates_merged: usize,
    /// Usable reactions that lost at least one compound.
    pub reactions_partial: usize,
    pub compounds_in: usize,
    pub compounds_unresolved: usize,
    pub generic_fixed: usize,
    /// Canonical keys shared by more than one compound id.
    pub compound_merges: usize,
    pub mono_reactions: usize,
    pub mono_flagged: usize,
    pub unique_products: usize,
    pub negatives_generated: usize,
    /// Negatives available per positive mono-product reaction.
    pub negatives_per_positive_histogram: BTreeMap<usize, usize>,
}
