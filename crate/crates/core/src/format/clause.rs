use crate::drs::{Clause, ClauseSet, Term, TermKind};
use crate::registry::Registry;

use super::{strip_comment, FormatError, ParseMode};

/// Clause-file reader bound to a registry and a parse mode.
///
/// Grammar: one clause per line, whitespace-separated fields
/// `box relation arg [arg [arg]]`; `%` starts a comment; blank lines are
/// ignored.
#[derive(Debug, Clone, Copy)]
pub struct ClauseReader<'r> {
    pub registry: &'r Registry,
    pub mode: ParseMode,
}

impl<'r> ClauseReader<'r> {
    pub fn new(registry: &'r Registry, mode: ParseMode) -> Self {
        ClauseReader { registry, mode }
    }

    /// Parses one line; `Ok(None)` for blank and comment-only lines.
    pub fn parse_line(&self, line_no: usize, raw: &str) -> Result<Option<Clause>, FormatError> {
        let fields: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        if fields.is_empty() {
            return Ok(None);
        }
        if !(3..=5).contains(&fields.len()) {
            return Err(FormatError::MalformedLine {
                line: line_no,
                detail: format!("expected 3 to 5 fields, got {}", fields.len()),
            });
        }
        let box_term = Term::parse(fields[0])
            .map_err(|e| FormatError::MalformedLine { line: line_no, detail: e.to_string() })?;
        if box_term.kind() != TermKind::BoxVariable {
            return Err(FormatError::BadVariableName { line: line_no, token: fields[0].to_string() });
        }
        let clause = Clause::from_fields(&fields)
            .map_err(|e| FormatError::MalformedLine { line: line_no, detail: e.to_string() })?;
        if self.mode == ParseMode::Strict {
            let sig = self.registry.signature(clause.relation()).ok_or_else(|| FormatError::UnknownArity {
                line: line_no,
                relation: clause.relation().to_string(),
            })?;
            if sig.arity() != clause.args().len() {
                return Err(FormatError::MalformedLine {
                    line: line_no,
                    detail: format!(
                        "{} takes {} argument(s), got {}",
                        clause.relation(),
                        sig.arity(),
                        clause.args().len()
                    ),
                });
            }
            if let Some((_, term)) = sig.args.iter().zip(clause.args()).find(|(kind, term)| !kind.accepts(term)) {
                return Err(FormatError::BadVariableName { line: line_no, token: term.label().to_string() });
            }
        }
        Ok(Some(clause))
    }

    /// Parses a whole clause document. Line numbers in errors are 1-based
    /// and offset by `first_line - 1`.
    pub fn parse_lines<'a>(
        &self,
        lines: impl IntoIterator<Item = (usize, &'a str)>,
    ) -> Result<ClauseSet, FormatError> {
        let mut clauses = Vec::new();
        for (no, line) in lines {
            if let Some(c) = self.parse_line(no, line)? {
                clauses.push(c);
            }
        }
        Ok(ClauseSet::new(clauses))
    }

    pub fn parse(&self, text: &str) -> Result<ClauseSet, FormatError> {
        self.parse_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)))
    }
}

/// Parses a clause document with the bundled registry.
pub fn parse_clause_file(text: &str, mode: ParseMode) -> Result<ClauseSet, FormatError> {
    ClauseReader::new(Registry::bundled(), mode).parse(text)
}

/// One clause per line in document order, fields joined by single spaces.
pub fn serialize_clause_file(set: &ClauseSet) -> String {
    let mut out = String::new();
    for clause in set.clauses() {
        out.push_str(&clause.to_string());
        out.push('\n');
    }
    out
}
