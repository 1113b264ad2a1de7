//! Dataset assembly, candidate ranking and multistep search on top of
//! `retrokit-core` chemistry and `retrokit-neural` networks.
//!
//! * [`dataset`]: corpus ingestion and cleaning, mono-product splitting,
//!   negative generation by template augmentation, group-aware splits.
//! * [`ranking`]: Tanimoto baseline and network scorers, deterministic
//!   ranking, coverage evaluation.
//! * [`pipeline`]: level-synchronous backward search with pruning, beam
//!   selection and pathway reconstruction.
//! * [`synth`]: seeded synthetic corpora and planted pathways for testing.

pub mod dataset;
pub mod pipeline;
pub mod ranking;
pub mod synth;
