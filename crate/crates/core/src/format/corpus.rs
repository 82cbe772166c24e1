//! Multi-document files.
//!
//! Clause and SBN corpora hold one document per block; blocks are separated
//! by blank lines. A `%%% ` comment line inside a block carries the
//! document's source text. Sequence corpora hold one linearized document
//! per line. Document ids are 1-based ordinals.

use serde::Serialize;

use crate::drs::{ClauseSet, SequentialGraph, SymbolSequence};
use crate::validate::ErrorClass;

use super::clause::ClauseReader;
use super::sbn::parse_sbn_line;
use super::{FormatError, IllFormed};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub file: Option<String>,
    pub first_line: usize,
    pub last_line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "form", content = "value", rename_all = "kebab-case")]
pub enum Representation {
    Clauses(ClauseSet),
    Sequential(SequentialGraph),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Document<T> {
    pub id: String,
    pub source_text: String,
    pub provenance: Provenance,
    pub content: T,
}

impl<T> Document<T> {
    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Document<U> {
        Document { id: self.id, source_text: self.source_text, provenance: self.provenance, content: f(self.content) }
    }

    pub fn as_ref(&self) -> Document<&T> {
        Document {
            id: self.id.clone(),
            source_text: self.source_text.clone(),
            provenance: self.provenance.clone(),
            content: &self.content,
        }
    }
}

impl FormatError {
    /// Validation class a structural failure is reported under.
    pub fn class(&self) -> ErrorClass {
        match self {
            FormatError::UnknownArity { .. } => ErrorClass::UnknownRelation,
            FormatError::MalformedItem { .. } => ErrorClass::OffsetOutOfRange,
            FormatError::MalformedLine { .. } | FormatError::BadVariableName { .. } => {
                ErrorClass::IllegalClauseStructure
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block<'a> {
    pub first_line: usize,
    pub last_line: usize,
    pub source: Option<String>,
    /// Non-header lines with their 1-based line numbers.
    pub lines: Vec<(usize, &'a str)>,
}

pub fn split_blocks(text: &str) -> Vec<Block<'_>> {
    let mut blocks = Vec::new();
    let mut current: Option<Block> = None;
    for (i, line) in text.lines().enumerate() {
        let no = i + 1;
        if line.trim().is_empty() {
            blocks.extend(current.take());
            continue;
        }
        let block = current.get_or_insert_with(|| Block { first_line: no, last_line: no, source: None, lines: Vec::new() });
        block.last_line = no;
        if let Some(src) = line.trim_start().strip_prefix("%%%") {
            if block.source.is_none() {
                block.source = Some(src.trim().to_string());
            }
        } else {
            block.lines.push((no, line));
        }
    }
    blocks.extend(current);
    blocks
}

fn document<T>(index: usize, block: &Block<'_>, file: Option<&str>, content: T) -> Document<T> {
    Document {
        id: (index + 1).to_string(),
        source_text: block.source.clone().unwrap_or_default(),
        provenance: Provenance { file: file.map(str::to_string), first_line: block.first_line, last_line: block.last_line },
        content,
    }
}

fn parse_block<T>(
    block: &Block<'_>,
    mut line: impl FnMut(usize, &str) -> Result<Option<T>, FormatError>,
) -> Result<Vec<T>, IllFormed> {
    let mut out = Vec::new();
    for &(no, text) in &block.lines {
        match line(no, text) {
            Ok(Some(x)) => out.push(x),
            Ok(None) => {}
            Err(e) => return Err(IllFormed { class: e.class(), location: out.len(), detail: e.to_string() }),
        }
    }
    Ok(out)
}

/// Parses every block as a clause document. Failures are per document.
pub fn parse_clause_corpus(
    text: &str,
    file: Option<&str>,
    reader: &ClauseReader<'_>,
) -> Vec<Document<Result<ClauseSet, IllFormed>>> {
    split_blocks(text)
        .iter()
        .enumerate()
        .map(|(i, block)| {
            let parsed = parse_block(block, |no, l| reader.parse_line(no, l)).map(ClauseSet::new);
            document(i, block, file, parsed)
        })
        .collect()
}

pub fn parse_sbn_corpus(text: &str, file: Option<&str>) -> Vec<Document<Result<SequentialGraph, IllFormed>>> {
    split_blocks(text)
        .iter()
        .enumerate()
        .map(|(i, block)| {
            let parsed = parse_block(block, parse_sbn_line).map(SequentialGraph::new);
            document(i, block, file, parsed)
        })
        .collect()
}

/// One document per non-blank line.
pub fn parse_sequence_corpus(text: &str, file: Option<&str>) -> Vec<Document<SymbolSequence>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .enumerate()
        .map(|(i, (no, line))| Document {
            id: (i + 1).to_string(),
            source_text: String::new(),
            provenance: Provenance { file: file.map(str::to_string), first_line: no + 1, last_line: no + 1 },
            content: SymbolSequence::from_text(line),
        })
        .collect()
}

/// Writes `(source text, serialized body)` pairs as blank-line separated blocks.
pub fn serialize_corpus<'a>(docs: impl IntoIterator<Item = (&'a str, String)>) -> String {
    let mut out = String::new();
    for (i, (source, body)) in docs.into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        if !source.is_empty() {
            out.push_str("%%% ");
            out.push_str(source);
            out.push('\n');
        }
        out.push_str(&body);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::ParseMode;
    use crate::registry::Registry;

    const CORPUS: &str = "%%% Tom slept.\nb1 REF x1\nb1 male \"n.02\" x1\n\n\n%%% Hello\nb1 REF e1 x9\n\nb2 REF x1\n";

    #[test]
    fn blocks_and_sources() {
        let blocks = split_blocks(CORPUS);
        assert_eq!(blocks.len(), 3);
        assert_eq!(blocks[0].source.as_deref(), Some("Tom slept."));
        assert_eq!((blocks[0].first_line, blocks[0].last_line), (1, 3));
        assert_eq!(blocks[1].lines, vec![(7, "b1 REF e1 x9")]);
        assert_eq!(blocks[2].source, None);
    }

    #[test]
    fn clause_corpus_isolates_failures() {
        let reader = ClauseReader::new(Registry::bundled(), ParseMode::Strict);
        let docs = parse_clause_corpus(CORPUS, Some("pred.clf"), &reader);
        assert_eq!(docs.len(), 3);
        assert_eq!(docs[0].content.as_ref().unwrap().len(), 2);
        let err = docs[1].content.as_ref().unwrap_err();
        assert_eq!(err.class, ErrorClass::IllegalClauseStructure);
        assert_eq!(err.location, 0);
        assert_eq!(docs[2].id, "3");
        assert_eq!(docs[1].provenance.file.as_deref(), Some("pred.clf"));
    }

    #[test]
    fn sequence_corpus_and_serialization() {
        let docs = parse_sequence_corpus("b1 REF x1\n\nb1 REF x2 <sep> b1 REF x3\n", None);
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[1].provenance.first_line, 3);
        let text = serialize_corpus(vec![("A.", "x\n".to_string()), ("", "y\n".to_string())]);
        assert_eq!(text, "%%% A.\nx\n\ny\n");
        assert_eq!(split_blocks(&text).len(), 2);
    }
}
