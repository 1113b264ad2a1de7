use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use retrokit_core::fingerprint::{molecule_fingerprint, set_fingerprint, DEFAULT_RADIUS, DEFAULT_WIDTH};
use retrokit_core::molgraph::SmilesError;
use retrokit_core::CanonicalSmiles;

use super::{CorpusStats, Label, MonoProductReaction, Origin, RawReaction, ReactionRecord};

/// One generic-symbol substitution made while cleaning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replacement {
    /// Byte offset in the raw string.
    pub offset: usize,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanedCompound {
    pub key: CanonicalSmiles,
    pub replacements: Vec<Replacement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CleanError {
    #[error("compound `{raw}` cannot be fixed: {source}")]
    Unfixable { raw: String, source: SmilesError },
}

/// Replaces generic symbols before parsing: halide `X` becomes `Cl` and
/// alkyl `R`, `R#` or a numbered `[R1]` becomes a methyl carbon.
pub fn clean_compound(raw: &str) -> Result<CleanedCompound, CleanError> {
    let (text, replacements) = substitute_generics(raw);
    match CanonicalSmiles::from_smiles(&text) {
        Ok(key) => Ok(CleanedCompound { key, replacements }),
        Err(source) => Err(CleanError::Unfixable { raw: raw.to_string(), source }),
    }
}

fn substitute_generics(raw: &str) -> (String, Vec<Replacement>) {
    let bytes = raw.as_bytes();
    let mut out = String::with_capacity(raw.len() + 4);
    let mut log = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'[' => {
                let end = raw[i..].find(']').map(|e| i + e + 1);
                let fixed = end.and_then(|end| {
                    let inner = &raw[i + 1..end - 1];
                    generic_bracket(inner).map(|to| (end, to))
                });
                match fixed {
                    Some((end, to)) => {
                        log.push(Replacement { offset: i, from: raw[i..end].to_string(), to: to.to_string() });
                        out.push_str(to);
                        i = end;
                    }
                    None => {
                        let stop = end.unwrap_or(bytes.len());
                        out.push_str(&raw[i..stop]);
                        i = stop;
                    }
                }
            }
            b'X' => {
                log.push(Replacement { offset: i, from: "X".into(), to: "Cl".into() });
                out.push_str("Cl");
                i += 1;
            }
            b'R' => {
                let len = if bytes.get(i + 1) == Some(&b'#') { 2 } else { 1 };
                log.push(Replacement { offset: i, from: raw[i..i + len].to_string(), to: "C".into() });
                out.push('C');
                i += len;
            }
            _ => {
                let ch = raw[i..].chars().next().expect("in bounds");
                out.push(ch);
                i += ch.len_utf8();
            }
        }
    }
    (out, log)
}

fn generic_bracket(inner: &str) -> Option<&'static str> {
    if inner == "X" {
        return Some("Cl");
    }
    let rest = inner.strip_prefix('R')?;
    let rest = rest.strip_prefix('#').unwrap_or(rest);
    rest.bytes().all(|b| b.is_ascii_digit()).then_some("C")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompoundEntry {
    Resolved(CanonicalSmiles),
    Unresolved,
}

/// Compound id to cleaned key, with the counters gathered while building it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CompoundTable {
    entries: BTreeMap<String, CompoundEntry>,
    /// Keys shared by several ids, with those ids in input order.
    pub merges: Vec<(CanonicalSmiles, Vec<String>)>,
    pub compounds_in: usize,
    pub unresolved: usize,
    pub generic_fixed: usize,
}

impl CompoundTable {
    pub fn get(&self, id: &str) -> Option<&CompoundEntry> {
        self.entries.get(id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Cleans every `(id, raw SMILES or None)` row. Rows without SMILES and
/// unfixable rows become unresolved entries. A repeated id keeps its first row.
pub fn build_compound_table(rows: &[(String, Option<String>)]) -> CompoundTable {
    let mut table = CompoundTable::default();
    let mut by_key: BTreeMap<CanonicalSmiles, Vec<String>> = BTreeMap::new();
    for (id, raw) in rows {
        if table.entries.contains_key(id) {
            continue;
        }
        table.compounds_in += 1;
        let entry = match raw.as_deref().map(clean_compound) {
            Some(Ok(cleaned)) => {
                if !cleaned.replacements.is_empty() {
                    table.generic_fixed += 1;
                }
                by_key.entry(cleaned.key.clone()).or_default().push(id.clone());
                CompoundEntry::Resolved(cleaned.key)
            }
            _ => {
                table.unresolved += 1;
                CompoundEntry::Unresolved
            }
        };
        table.entries.insert(id.clone(), entry);
    }
    table.merges = by_key.into_iter().filter(|(_, ids)| ids.len() > 1).collect();
    table
}

/// Resolves each side through `table` (tokens missing from the table are
/// read as SMILES), drops unresolved compounds, drops reactions left with an
/// empty side and merges reactions that become identical, uniting their EC
/// numbers. Output keeps first-occurrence order.
pub fn clean_reactions(raw: &[RawReaction], table: &CompoundTable) -> (Vec<ReactionRecord>, CorpusStats) {
    let mut stats = CorpusStats {
        reactions_in: raw.len(),
        compounds_in: table.compounds_in,
        compounds_unresolved: table.unresolved,
        generic_fixed: table.generic_fixed,
        compound_merges: table.merges.len(),
        ..CorpusStats::default()
    };
    let mut records: Vec<ReactionRecord> = Vec::new();
    let mut seen: HashMap<(Vec<CanonicalSmiles>, Vec<CanonicalSmiles>), usize> = HashMap::new();
    let mut inline_cache: HashMap<String, Option<CanonicalSmiles>> = HashMap::new();
    for reaction in raw {
        let mut lost = false;
        let mut resolve_side = |tokens: &[String]| -> Vec<CanonicalSmiles> {
            let mut keys = Vec::with_capacity(tokens.len());
            for token in tokens {
                let key = match table.get(token) {
                    Some(CompoundEntry::Resolved(k)) => Some(k.clone()),
                    Some(CompoundEntry::Unresolved) => None,
                    None => inline_cache
                        .entry(token.clone())
                        .or_insert_with(|| clean_compound(token).ok().map(|c| c.key))
                        .clone(),
                };
                match key {
                    Some(k) => keys.push(k),
                    None => lost = true,
                }
            }
            keys.sort();
            keys
        };
        let reactants = resolve_side(&reaction.reactants);
        let products = resolve_side(&reaction.products);
        if reactants.is_empty() || products.is_empty() {
            stats.reactions_broken += 1;
            continue;
        }
        if lost {
            stats.reactions_partial += 1;
        }
        match seen.get(&(reactants.clone(), products.clone())) {
            Some(&at) => {
                stats.duplicates_merged += 1;
                let ec = &mut records[at].ec_numbers;
                ec.extend(reaction.ec_numbers.iter().cloned());
                ec.sort();
                ec.dedup();
            }
            None => {
                seen.insert((reactants.clone(), products.clone()), records.len());
                let mut ec_numbers = reaction.ec_numbers.clone();
                ec_numbers.sort();
                ec_numbers.dedup();
                records.push(ReactionRecord {
                    reaction_id: reaction.reaction_id.clone(),
                    ec_numbers,
                    reactants,
                    products,
                    origin: Origin::Assembled,
                });
            }
        }
    }
    stats.reactions_usable = records.len();
    stats.reactions_dropped = stats.reactions_broken + stats.duplicates_merged;
    (records, stats)
}

/// One child per product, each inheriting the parent's id, EC numbers and
/// full reactant multiset. Children whose product shares no fingerprint bit
/// with the reactants are kept and flagged.
pub fn split_mono_product(records: &[ReactionRecord]) -> Vec<MonoProductReaction> {
    let mut out = Vec::new();
    for record in records {
        let reactant_graphs: Vec<_> = record.reactants.iter().map(CanonicalSmiles::to_graph).collect();
        let reactant_fp =
            set_fingerprint(&reactant_graphs, DEFAULT_WIDTH, DEFAULT_RADIUS).expect("default width is valid");
        for product in &record.products {
            let fp = molecule_fingerprint(&product.to_graph(), DEFAULT_WIDTH, DEFAULT_RADIUS)
                .expect("default width is valid");
            let shared = fp.intersection_count(&reactant_fp).expect("same width");
            out.push(MonoProductReaction {
                parent_id: record.reaction_id.clone(),
                ec_numbers: record.ec_numbers.clone(),
                reactants: record.reactants.clone(),
                product: product.clone(),
                label: Label::Positive,
                origin: record.origin.clone(),
                no_shared_bits: shared == 0,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(s: &str) -> CanonicalSmiles {
        CanonicalSmiles::from_smiles(s).unwrap()
    }

    fn raw(id: &str, reactants: &[&str], products: &[&str]) -> RawReaction {
        RawReaction {
            reaction_id: id.into(),
            ec_numbers: vec!["1.1.1.1".into()],
            reactants: reactants.iter().map(|s| s.to_string()).collect(),
            products: products.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn halide_and_alkyl_symbols_are_replaced() {
        let c = clean_compound("CX").unwrap();
        assert_eq!(c.key, key("CCl"));
        assert_eq!(c.replacements.len(), 1);
        assert_eq!(c.replacements[0].to, "Cl");
        let r = clean_compound("OC(=O)CR").unwrap();
        assert_eq!(r.key, key("OC(=O)CC"));
        assert_eq!(clean_compound("[R1]CO").unwrap().key, key("CCO"));
        assert_eq!(clean_compound("R#CO").unwrap().key, key("CCO"));
        assert_eq!(clean_compound("[X]C").unwrap().key, key("CCl"));
    }

    #[test]
    fn clean_input_is_untouched() {
        let c = clean_compound("CCO").unwrap();
        assert_eq!(c.key, key("CCO"));
        assert!(c.replacements.is_empty());
        assert!(clean_compound("[Cl-]").unwrap().replacements.is_empty());
        assert!(clean_compound("Br").unwrap().replacements.is_empty());
    }

    #[test]
    fn syntax_errors_are_unfixable() {
        assert!(matches!(clean_compound("C("), Err(CleanError::Unfixable { .. })));
    }

    #[test]
    fn compound_table_counts_and_merges() {
        let rows = vec![
            ("C1".to_string(), Some("CCO".to_string())),
            ("C2".to_string(), Some("OCC".to_string())),
            ("C3".to_string(), None),
            ("C4".to_string(), Some("CX".to_string())),
            ("C5".to_string(), Some("C(".to_string())),
        ];
        let table = build_compound_table(&rows);
        assert_eq!(table.compounds_in, 5);
        assert_eq!(table.unresolved, 2);
        assert_eq!(table.generic_fixed, 1);
        assert_eq!(table.merges, vec![(key("CCO"), vec!["C1".to_string(), "C2".to_string()])]);
        assert_eq!(table.get("C3"), Some(&CompoundEntry::Unresolved));
    }

    #[test]
    fn per_side_survival() {
        let rows = vec![
            ("A".to_string(), Some("CCO".to_string())),
            ("B".to_string(), None),
            ("P".to_string(), Some("CC=O".to_string())),
        ];
        let table = build_compound_table(&rows);
        let input = vec![raw("R1", &["A"], &["P"]), raw("R2", &["A"], &["B"]), raw("R3", &["A", "B"], &["P", "O"])];
        let (records, stats) = clean_reactions(&input, &table);
        assert_eq!(records.len(), 2);
        assert_eq!(stats.reactions_broken, 1);
        assert_eq!(stats.reactions_partial, 1);
        assert_eq!(records[1].reactants, vec![key("CCO")]);
        assert_eq!(records[1].products, vec![key("CC=O"), key("O")]);
        assert_eq!(stats.reactions_in, stats.reactions_usable + stats.reactions_dropped);
    }

    #[test]
    fn duplicates_merge_their_ec_numbers() {
        let mut second = raw("R2", &["OCC"], &["CC=O"]);
        second.ec_numbers = vec!["1.1.1.2".into()];
        let (records, stats) = clean_reactions(&[raw("R1", &["CCO"], &["CC=O"]), second], &CompoundTable::default());
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].ec_numbers, vec!["1.1.1.1".to_string(), "1.1.1.2".to_string()]);
        assert_eq!(stats.duplicates_merged, 1);
        assert_eq!(stats.reactions_in, stats.reactions_usable + stats.reactions_dropped);
    }

    #[test]
    fn mono_split_inherits_reactants() {
        let (records, _) = clean_reactions(&[raw("R1", &["CCO", "O=O"], &["CC=O", "OO"])], &CompoundTable::default());
        let mono = split_mono_product(&records);
        assert_eq!(mono.len(), 2);
        for m in &mono {
            assert_eq!(m.parent_id, "R1");
            assert_eq!(m.reactants, records[0].reactants);
        }
        let products: Vec<_> = mono.iter().map(|m| m.product.clone()).collect();
        assert_eq!(products, vec![key("CC=O"), key("OO")]);
    }

    #[test]
    fn unrelated_product_is_flagged() {
        let (records, _) = clean_reactions(&[raw("R1", &["CCCC"], &["CCCC", "Br"])], &CompoundTable::default());
        let mono = split_mono_product(&records);
        let flagged: Vec<bool> = mono.iter().map(|m| m.no_shared_bits).collect();
        assert_eq!(flagged.iter().filter(|&&f| f).count(), 1);
    }
}
