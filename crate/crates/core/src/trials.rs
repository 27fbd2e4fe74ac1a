//! Trial tables in CSV form.
//!
//! The header is `context,<content>,...`. Each further row is one trial: the
//! context label, then `+1` or `-1` under every content the context measures
//! and an empty cell under every other content.

use std::collections::BTreeSet;
use std::io::Read;

use thiserror::Error;

use crate::system::{ingest_trials, Outcome, Sign, System, SystemError, SystemFormat};

#[derive(Debug, Error)]
pub enum TrialsError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("header must start with `context`")]
    MissingContextColumn,
    #[error("header column `{0}` is not a content of the format")]
    UnknownColumn(String),
    #[error("header lists `{0}` twice")]
    DuplicateColumn(String),
    #[error("content `{0}` is measured by some context but has no column")]
    MissingColumn(String),
    #[error("line {line}: unknown context `{context}`")]
    UnknownContext { line: u64, context: String },
    #[error("line {line}: expected {expected} cells, found {found}")]
    RowLength { line: u64, expected: usize, found: usize },
    #[error("line {line}: `{content}` is measured in `{context}` but the cell is empty")]
    MissingValue { line: u64, context: String, content: String },
    #[error("line {line}: `{content}` is not measured in `{context}` but the cell is `{value}`")]
    UnexpectedValue { line: u64, context: String, content: String, value: String },
    #[error("line {line}: cell `{value}` is not +1 or -1")]
    BadValue { line: u64, value: String },
    #[error(transparent)]
    System(#[from] SystemError),
}

fn sign(cell: &str) -> Option<Sign> {
    match cell {
        "+1" => Some(Sign::Plus),
        "-1" => Some(Sign::Minus),
        _ => None,
    }
}

/// Reads a trial table and returns the system of empirical frequencies.
pub fn read_trials<R: Read>(format: &SystemFormat, input: R) -> Result<System, TrialsError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).trim(csv::Trim::All).from_reader(input);
    let header = reader.headers()?.clone();
    let mut cells = header.iter();
    if cells.next() != Some("context") {
        return Err(TrialsError::MissingContextColumn);
    }
    let columns: Vec<String> = cells.map(str::to_string).collect();
    let mut seen = BTreeSet::new();
    for c in &columns {
        if !format.contents.contains(c) {
            return Err(TrialsError::UnknownColumn(c.clone()));
        }
        if !seen.insert(c.as_str()) {
            return Err(TrialsError::DuplicateColumn(c.clone()));
        }
    }
    for ctx in &format.contexts {
        if let Some(q) = ctx.measured.iter().find(|q| !seen.contains(q.as_str())) {
            return Err(TrialsError::MissingColumn(q.clone()));
        }
    }

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != columns.len() + 1 {
            return Err(TrialsError::RowLength { line, expected: columns.len() + 1, found: row.len() });
        }
        let label = &row[0];
        let ctx = format
            .contexts
            .iter()
            .find(|c| c.label == label)
            .ok_or_else(|| TrialsError::UnknownContext { line, context: label.to_string() })?;
        let mut signs = vec![None; ctx.arity()];
        for (content, cell) in columns.iter().zip(row.iter().skip(1)) {
            match (ctx.position(content), cell.is_empty()) {
                (Some(_), true) => {
                    return Err(TrialsError::MissingValue {
                        line,
                        context: ctx.label.clone(),
                        content: content.clone(),
                    })
                }
                (Some(i), false) => {
                    signs[i] = Some(sign(cell).ok_or_else(|| TrialsError::BadValue { line, value: cell.to_string() })?);
                }
                (None, true) => {}
                (None, false) => {
                    return Err(TrialsError::UnexpectedValue {
                        line,
                        context: ctx.label.clone(),
                        content: content.clone(),
                        value: cell.to_string(),
                    })
                }
            }
        }
        let signs = signs.into_iter().collect::<Option<Vec<_>>>().expect("every measured content has a column");
        records.push((ctx.label.clone(), Outcome::new(signs)));
    }
    Ok(ingest_trials(format, records)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl;
    use crate::rational::ratio;

    const SPECKER_TRIALS: &str = "\
context,q1,q2,q3
c1,+1,+1,
c1,-1,-1,
c1,+1,+1,
c1,-1,-1,
c2,,+1,+1
c2,,-1,-1
c3,+1,,-1
c3,-1,,+1
";

    fn read(text: &str) -> Result<System, TrialsError> {
        read_trials(&System::specker().format(), text.as_bytes())
    }

    #[test]
    fn specker_trials_reproduce_specker() {
        assert_eq!(read(SPECKER_TRIALS).unwrap(), System::specker());
    }

    #[test]
    fn columns_may_be_reordered() {
        let s = read("context,q3,q1,q2\nc1,,+1,+1\nc2,+1,,-1\nc3,-1,+1,\nc3,-1,-1,\n").unwrap();
        assert_eq!(s.pmf("c2").unwrap().get(&Outcome::parse("-+").unwrap()), ratio(1, 1));
        assert_eq!(s.pmf("c3").unwrap().get(&Outcome::parse("--").unwrap()), ratio(1, 2));
    }

    #[test]
    fn value_in_unmeasured_column_is_rejected() {
        let err = read("context,q1,q2,q3\nc1,+1,+1,-1\n").unwrap_err();
        assert!(matches!(err, TrialsError::UnexpectedValue { line: 2, ref content, .. } if content == "q3"));
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(read("q1,q2,q3\n"), Err(TrialsError::MissingContextColumn)));
        assert!(matches!(read("context,q1,q2,q9\n"), Err(TrialsError::UnknownColumn(c)) if c == "q9"));
        assert!(matches!(read("context,q1,q1,q2,q3\n"), Err(TrialsError::DuplicateColumn(_))));
        assert!(matches!(read("context,q1,q2\n"), Err(TrialsError::MissingColumn(c)) if c == "q3"));
        assert!(matches!(read("context,q1,q2,q3\nc1,+1,,\n"), Err(TrialsError::MissingValue { .. })));
        assert!(matches!(read("context,q1,q2,q3\nc1,+1,1,\n"), Err(TrialsError::BadValue { .. })));
        assert!(matches!(read("context,q1,q2,q3\nc7,+1,+1,\n"), Err(TrialsError::UnknownContext { .. })));
        assert!(matches!(read("context,q1,q2,q3\nc1,+1,+1\n"), Err(TrialsError::RowLength { found: 3, .. })));
        assert!(matches!(read("context,q1,q2,q3\nc1,+1,+1,\n"), Err(TrialsError::System(SystemError::EmptyContext(_)))));
    }

    #[test]
    fn ingested_system_serializes() {
        let s = read(SPECKER_TRIALS).unwrap();
        assert_eq!(dsl::serialize(&s), dsl::serialize(&System::specker()));
    }
}
