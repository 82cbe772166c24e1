//! Relation arity registry: relation name to arity and argument-kind
//! signature, loaded from a tab-separated table.
//!
//! ```text
//! # comment
//! REF<TAB>1<TAB>V
//! Agent<TAB>2<TAB>vt
//! ```

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::drs::{RelationCategory, Term, TermKind};

const BUNDLED: &str = include_str!("registry.tsv");

/// What an argument position accepts. Uppercase kinds bind the variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ArgKind {
    BoxUse,
    BoxBinding,
    EntityUse,
    EntityBinding,
    Constant,
    Any,
}

impl ArgKind {
    pub fn from_letter(c: char) -> Option<ArgKind> {
        Some(match c {
            'b' => ArgKind::BoxUse,
            'B' => ArgKind::BoxBinding,
            'v' => ArgKind::EntityUse,
            'V' => ArgKind::EntityBinding,
            'c' => ArgKind::Constant,
            't' => ArgKind::Any,
            _ => return None,
        })
    }

    pub fn letter(self) -> char {
        match self {
            ArgKind::BoxUse => 'b',
            ArgKind::BoxBinding => 'B',
            ArgKind::EntityUse => 'v',
            ArgKind::EntityBinding => 'V',
            ArgKind::Constant => 'c',
            ArgKind::Any => 't',
        }
    }

    pub fn accepts(self, term: &Term) -> bool {
        match self {
            ArgKind::BoxUse | ArgKind::BoxBinding => term.kind() == TermKind::BoxVariable,
            ArgKind::EntityUse | ArgKind::EntityBinding => term.kind() == TermKind::EntityVariable,
            ArgKind::Constant => term.kind() == TermKind::Constant,
            ArgKind::Any => true,
        }
    }

    pub fn binds(self) -> bool {
        matches!(self, ArgKind::BoxBinding | ArgKind::EntityBinding)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub args: Vec<ArgKind>,
}

impl Signature {
    pub fn arity(&self) -> usize {
        self.args.len()
    }

    fn parse(kinds: &str) -> Option<Signature> {
        kinds.chars().map(ArgKind::from_letter).collect::<Option<Vec<_>>>().map(|args| Signature { args })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("registry line {line}: {detail}")]
    Malformed { line: usize, detail: String },
}

#[derive(Debug, Clone)]
pub struct Registry {
    entries: HashMap<String, Signature>,
    concept: Signature,
}

impl Registry {
    /// The table shipped with the crate.
    pub fn bundled() -> &'static Registry {
        static REGISTRY: OnceLock<Registry> = OnceLock::new();
        REGISTRY.get_or_init(|| Registry::parse(BUNDLED).expect("bundled registry parses"))
    }

    pub fn parse(text: &str) -> Result<Registry, RegistryError> {
        let mut entries = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let malformed = |detail: String| RegistryError::Malformed { line: i + 1, detail };
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [name, arity, kinds] = fields[..] else {
                return Err(malformed(format!("expected 3 tab-separated fields, got {}", fields.len())));
            };
            let arity: usize = arity.parse().map_err(|_| malformed(format!("bad arity {arity:?}")))?;
            let sig = Signature::parse(kinds).ok_or_else(|| malformed(format!("bad argkinds {kinds:?}")))?;
            if sig.arity() != arity || !(1..=3).contains(&arity) {
                return Err(malformed(format!("arity {arity} does not match argkinds {kinds:?}")));
            }
            if entries.insert(name.to_string(), sig).is_some() {
                return Err(malformed(format!("duplicate relation {name}")));
            }
        }
        Ok(Registry {
            entries,
            concept: Signature { args: vec![ArgKind::Constant, ArgKind::EntityUse] },
        })
    }

    /// Signature for `relation`: an explicit entry, else the concept default
    /// for lemma-like names, else `None` (unknown relation).
    pub fn signature(&self, relation: &str) -> Option<&Signature> {
        self.entries.get(relation).or_else(|| {
            (RelationCategory::of(relation) == RelationCategory::Concept).then_some(&self.concept)
        })
    }

    pub fn arity(&self, relation: &str) -> Option<usize> {
        self.signature(relation).map(Signature::arity)
    }

    /// True when `relation` has its own entry rather than a default.
    pub fn is_listed(&self, relation: &str) -> bool {
        self.entries.contains_key(relation)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Explicitly listed relations of one category, sorted.
    pub fn relations(&self, category: RelationCategory) -> Vec<&str> {
        let mut out: Vec<&str> = self
            .entries
            .keys()
            .filter(|k| RelationCategory::of(k) == category)
            .map(String::as_str)
            .collect();
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_has_core_relations() {
        let r = Registry::bundled();
        assert_eq!(r.arity("REF"), Some(1));
        assert_eq!(r.arity("Agent"), Some(2));
        assert_eq!(r.arity("IMP"), Some(2));
        assert_eq!(r.arity("male"), Some(2));
        assert_eq!(r.arity("Frobnicate"), None);
        assert_eq!(r.arity("FOO"), None);
        assert!(r.signature("REF").unwrap().args[0].binds());
        assert!(!r.relations(RelationCategory::SemanticRole).is_empty());
    }

    #[test]
    fn parse_errors() {
        assert!(Registry::parse("REF\t1\tV\n").is_ok());
        assert!(Registry::parse("REF 1 V\n").is_err());
        assert!(Registry::parse("REF\t2\tV\n").is_err());
        assert!(Registry::parse("REF\t1\tq\n").is_err());
        assert!(Registry::parse("REF\t1\tV\nREF\t1\tV\n").is_err());
        assert!(Registry::parse("# only a comment\n\n").unwrap().is_empty());
    }
}
