//! Domain types shared across the toolkit. No I/O happens here.

mod clause;
mod graph;
mod sequential;
mod symbols;
mod synset;
mod term;

pub use clause::{Clause, ClauseSet, Occurrence, RelationCategory};
pub use graph::{DrsGraph, Edge, GraphBuilder, GraphError, Node, NodeId};
pub use sequential::{Item, ItemHead, Satellite, SequentialGraph};
pub use symbols::{Joiner, Separator, SymbolSequence};
pub use synset::{Pos, SynsetId};
pub use term::{classify, is_reserved_token, Term, TermKind};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DrsError {
    #[error("empty {0}")]
    EmptyToken(&'static str),
    #[error("{what} contains whitespace: {token:?}")]
    Whitespace { what: &'static str, token: String },
    #[error("token {0} is reserved")]
    ReservedToken(String),
    #[error("bad variable name {token:?}: expected {expected:?}")]
    BadVariableName { token: String, expected: TermKind },
    #[error("a clause takes 1 to 3 arguments, got {0}")]
    ArgCount(usize),
    #[error("malformed synset {text:?}: {reason}")]
    MalformedSynset { text: String, reason: &'static str },
    #[error("satellite offset must be nonzero")]
    ZeroOffset,
    #[error("separator {0:?} must look like <name>")]
    BadSeparator(String),
}
