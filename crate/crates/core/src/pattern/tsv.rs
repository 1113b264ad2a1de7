use thiserror::Error;

use super::template::{Direction, ReactionTemplate, TemplateError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateFileError {
    #[error("line {line}: expected 5 tab-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: direction must be `fwd` or `bwd`, got {value:?}")]
    BadDirection { line: usize, value: String },
    #[error("line {line}: bad diameter {value:?}")]
    BadDiameter { line: usize, value: String },
    #[error("line {line}: empty template id")]
    EmptyId { line: usize },
    #[error("line {line}: duplicate template id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: {source}")]
    Template { line: usize, source: TemplateError },
}

const HEADER: &str = "template_id\tdirection\tdiameter\tec_numbers\tsmarts";

/// Reads a template table. Columns: `template_id`, `direction` (`fwd` or
/// `bwd`), `diameter`, `ec_numbers` (`;`-separated) and `smarts`. Lines
/// whose first non-blank character is `#`, blank lines and a header on
/// the first row are skipped.
/// Templates are returned as written; call `to_backward` before use.
pub fn parse_template_tsv(text: &str) -> Result<Vec<ReactionTemplate>, TemplateFileError> {
    let mut out: Vec<ReactionTemplate> = Vec::new();
    let mut ids = std::collections::HashSet::new();
    let mut first = true;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let row = raw.trim_end_matches('\r');
        let lead = row.trim_start();
        if lead.is_empty() || lead.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = row.split('\t').collect();
        if std::mem::take(&mut first) && cols[0].trim() == "template_id" {
            continue;
        }
        if cols.len() != 5 {
            return Err(TemplateFileError::ColumnCount { line, found: cols.len() });
        }
        let id = cols[0].trim();
        if id.is_empty() {
            return Err(TemplateFileError::EmptyId { line });
        }
        if !ids.insert(id.to_string()) {
            return Err(TemplateFileError::DuplicateId { line, id: id.to_string() });
        }
        let direction = Direction::from_code(cols[1].trim())
            .ok_or_else(|| TemplateFileError::BadDirection { line, value: cols[1].to_string() })?;
        let diameter = cols[2]
            .trim()
            .parse::<u32>()
            .map_err(|_| TemplateFileError::BadDiameter { line, value: cols[2].to_string() })?;
        let ec_numbers = cols[3].split(';').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
        let template = ReactionTemplate::parse(cols[4].trim())
            .map_err(|source| TemplateFileError::Template { line, source })?
            .with_id(id)
            .with_direction(direction)
            .with_diameter(diameter)
            .with_ec_numbers(ec_numbers);
        out.push(template);
    }
    Ok(out)
}

/// Writes templates in the format read by [`parse_template_tsv`].
pub fn write_template_tsv(templates: &[ReactionTemplate]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for t in templates {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            t.template_id,
            t.direction.code(),
            t.diameter,
            t.ec_numbers.join(";"),
            t.smarts()
        ));
    }
    out
}
