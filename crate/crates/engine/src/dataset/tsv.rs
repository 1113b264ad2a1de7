//! Tab-separated corpus and dataset files. Blank lines and lines whose first
//! non-blank character is `#` are ignored; a header row naming the first
//! column is optional.

use std::fmt::Write;

use thiserror::Error;

use retrokit_core::molgraph::SmilesError;
use retrokit_core::pattern::join_keys;
use retrokit_core::CanonicalSmiles;

use super::{DatasetRow, Label, MonoProductReaction, Origin, RawReaction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatasetFileError {
    #[error("line {line}: expected {expected} columns, found {found}")]
    ColumnCount { line: usize, expected: usize, found: usize },
    #[error("line {line}: {message}")]
    BadField { line: usize, message: String },
    #[error("line {line}: {source}")]
    Smiles { line: usize, source: SmilesError },
}

/// `(line number, fields)` of each data row.
fn rows<'a>(
    text: &'a str,
    header: &'a str,
    columns: usize,
) -> impl Iterator<Item = Result<(usize, Vec<&'a str>), DatasetFileError>> + 'a {
    let mut first = true;
    text.lines().enumerate().filter_map(move |(i, raw)| {
        let line = raw.trim_end_matches('\r');
        // fields are trimmed, so a comment marker may follow whitespace
        if line.trim_start().is_empty() || line.trim_start().starts_with('#') {
            return None;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if std::mem::take(&mut first) && fields[0].trim() == header {
            return None;
        }
        if fields.len() != columns {
            return Some(Err(DatasetFileError::ColumnCount { line: i + 1, expected: columns, found: fields.len() }));
        }
        Some(Ok((i + 1, fields)))
    })
}

fn split_list(field: &str, sep: char) -> Vec<String> {
    field.split(sep).map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect()
}

fn key_list(field: &str, line: usize) -> Result<Vec<CanonicalSmiles>, DatasetFileError> {
    let mut keys = split_list(field, '.')
        .iter()
        .map(|s| CanonicalSmiles::from_smiles(s).map_err(|source| DatasetFileError::Smiles { line, source }))
        .collect::<Result<Vec<_>, _>>()?;
    keys.sort();
    Ok(keys)
}

fn nonempty<'a>(field: &'a str, line: usize, what: &str) -> Result<&'a str, DatasetFileError> {
    let f = field.trim();
    if f.is_empty() {
        return Err(DatasetFileError::BadField { line, message: format!("empty {what}") });
    }
    Ok(f)
}

/// Columns: reaction_id, ec_numbers (`;`), reactants (`.`), products (`.`).
/// Reactant and product entries are compound ids or SMILES.
pub fn parse_reaction_tsv(text: &str) -> Result<Vec<RawReaction>, DatasetFileError> {
    rows(text, "reaction_id", 4)
        .map(|row| {
            let (line, f) = row?;
            Ok(RawReaction {
                reaction_id: nonempty(f[0], line, "reaction id")?.to_string(),
                ec_numbers: split_list(f[1], ';'),
                reactants: split_list(f[2], '.'),
                products: split_list(f[3], '.'),
            })
        })
        .collect()
}

pub fn write_reaction_tsv(reactions: &[RawReaction]) -> String {
    let mut out = String::from("reaction_id\tec_numbers\treactant_smiles\tproduct_smiles\n");
    for r in reactions {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            r.reaction_id,
            r.ec_numbers.join(";"),
            r.reactants.join("."),
            r.products.join(".")
        );
    }
    out
}

/// Columns: compound_id, raw SMILES or `UNRESOLVED`.
pub fn parse_compound_tsv(text: &str) -> Result<Vec<(String, Option<String>)>, DatasetFileError> {
    rows(text, "compound_id", 2)
        .map(|row| {
            let (line, f) = row?;
            let id = nonempty(f[0], line, "compound id")?.to_string();
            let raw = f[1].trim();
            let smiles = (!raw.is_empty() && raw != "UNRESOLVED").then(|| raw.to_string());
            Ok((id, smiles))
        })
        .collect()
}

pub fn write_compound_tsv(rows: &[(String, Option<String>)]) -> String {
    let mut out = String::from("compound_id\traw_smiles\n");
    for (id, smiles) in rows {
        let _ = writeln!(out, "{id}\t{}", smiles.as_deref().unwrap_or("UNRESOLVED"));
    }
    out
}

/// Columns: pathway_id, reaction ids in forward order (`;`).
pub fn parse_pathway_tsv(text: &str) -> Result<Vec<(String, Vec<String>)>, DatasetFileError> {
    rows(text, "pathway_id", 2)
        .map(|row| {
            let (line, f) = row?;
            let id = nonempty(f[0], line, "pathway id")?.to_string();
            Ok((id, split_list(f[1], ';')))
        })
        .collect()
}

/// Columns: parent_id, ec_numbers, reactants, product, flagged (0/1).
pub fn parse_mono_tsv(text: &str) -> Result<Vec<MonoProductReaction>, DatasetFileError> {
    rows(text, "parent_id", 5)
        .map(|row| {
            let (line, f) = row?;
            let product = key_list(f[3], line)?;
            if product.len() != 1 {
                return Err(DatasetFileError::BadField { line, message: "exactly one product expected".into() });
            }
            let reactants = key_list(f[2], line)?;
            if reactants.is_empty() {
                return Err(DatasetFileError::BadField { line, message: "no reactants".into() });
            }
            Ok(MonoProductReaction {
                parent_id: nonempty(f[0], line, "parent id")?.to_string(),
                ec_numbers: split_list(f[1], ';'),
                reactants,
                product: product.into_iter().next().expect("one product"),
                label: Label::Positive,
                origin: Origin::Assembled,
                no_shared_bits: parse_flag(f[4], line)?,
            })
        })
        .collect()
}

pub fn write_mono_tsv(rows: &[MonoProductReaction]) -> String {
    let mut out = String::from("parent_id\tec_numbers\treactants\tproduct\tflagged\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.parent_id,
            r.ec_numbers.join(";"),
            join_keys(&r.reactants),
            r.product,
            u8::from(r.no_shared_bits)
        );
    }
    out
}

fn parse_flag(field: &str, line: usize) -> Result<bool, DatasetFileError> {
    match field.trim() {
        "1" => Ok(true),
        "0" => Ok(false),
        other => Err(DatasetFileError::BadField { line, message: format!("expected 0 or 1, found `{other}`") }),
    }
}

/// Columns: label (0/1), group_key, target, precursors, weight. Precursor
/// keys are joined by `.` and the two steps of a chain by `>`.
pub fn parse_dataset_tsv(text: &str) -> Result<Vec<DatasetRow>, DatasetFileError> {
    rows(text, "label", 5)
        .map(|row| {
            let (line, f) = row?;
            let label = parse_flag(f[0], line)?;
            let target = CanonicalSmiles::from_smiles(f[2].trim())
                .map_err(|source| DatasetFileError::Smiles { line, source })?;
            let steps = f[3].split('>').map(|s| key_list(s, line)).collect::<Result<Vec<_>, _>>()?;
            if steps.len() > 2 || steps.iter().any(Vec::is_empty) {
                return Err(DatasetFileError::BadField {
                    line,
                    message: "precursors must be one or two non-empty steps".into(),
                });
            }
            let weight: f64 = f[4]
                .trim()
                .parse()
                .map_err(|_| DatasetFileError::BadField { line, message: format!("bad weight `{}`", f[4]) })?;
            if !(weight.is_finite() && weight > 0.0) {
                return Err(DatasetFileError::BadField { line, message: "weight must be positive".into() });
            }
            Ok(DatasetRow { label, group_key: nonempty(f[1], line, "group key")?.to_string(), target, steps, weight })
        })
        .collect()
}

pub fn write_dataset_tsv(rows: &[DatasetRow]) -> String {
    let mut out = String::from("label\tgroup_key\ttarget\tprecursors\tweight\n");
    for r in rows {
        let _ =
            writeln!(out, "{}\t{}\t{}\t{}\t{}", u8::from(r.label), r.group_key, r.target, r.candidate_key(), r.weight);
    }
    out
}
