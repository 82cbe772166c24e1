//! Text formats: clause files, SBN (sequential graph) files, flat symbol
//! sequences, and multi-document corpora built from them.

mod clause;
mod corpus;
mod linear;
mod sbn;

pub use clause::{parse_clause_file, serialize_clause_file, ClauseReader};
pub use corpus::{
    parse_clause_corpus, parse_sbn_corpus, parse_sequence_corpus, serialize_corpus, split_blocks, Block, Document,
    Provenance, Representation,
};
pub use linear::{delinearize_clauses, delinearize_sbn, linearize_clauses, linearize_sbn};
pub use sbn::{parse_sbn_file, parse_sbn_line, serialize_sbn_file};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::validate::ErrorClass;

/// Strict parsing enforces the arity registry (gold data); lenient parsing
/// only checks structure and leaves the rest to the validator (model output).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParseMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: malformed clause: {detail}")]
    MalformedLine { line: usize, detail: String },
    #[error("line {line}: relation {relation:?} has no registered arity")]
    UnknownArity { line: usize, relation: String },
    #[error("line {line}: bad variable name {token:?}")]
    BadVariableName { line: usize, token: String },
    #[error("line {line}: malformed item: {detail}")]
    MalformedItem { line: usize, detail: String },
}

impl FormatError {
    pub fn line(&self) -> usize {
        match self {
            FormatError::MalformedLine { line, .. }
            | FormatError::UnknownArity { line, .. }
            | FormatError::BadVariableName { line, .. }
            | FormatError::MalformedItem { line, .. } => *line,
        }
    }
}

/// A model output that could not be read back into a structure.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{class} at {location}: {detail}")]
pub struct IllFormed {
    pub class: ErrorClass,
    /// Clause or item index within the document.
    pub location: usize,
    pub detail: String,
}

/// Removes a `%` comment, ignoring `%` inside double-quoted constants.
pub(crate) fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '%' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments() {
        assert_eq!(strip_comment("b1 REF x1 % Tom [0...3]"), "b1 REF x1 ");
        assert_eq!(strip_comment("b1 Quantity x1 \"50%\""), "b1 Quantity x1 \"50%\"");
        assert_eq!(strip_comment("%%% Tom climbed"), "");
    }
}
