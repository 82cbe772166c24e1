use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::term::check_token;
use super::{DrsError, Term, TermKind};

/// Coarse relation taxonomy used by the fine-grained scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationCategory {
    DrsOperator,
    SemanticRole,
    Concept,
}

impl RelationCategory {
    /// All-uppercase names (`REF`, `NOT`, `SY1`) are operators, names with an
    /// uppercase initial (`Agent`, `Co-Theme`) are roles, everything else is a
    /// concept lemma.
    pub fn of(relation: &str) -> RelationCategory {
        let has_letter = relation.chars().any(char::is_alphabetic);
        if has_letter && !relation.chars().any(char::is_lowercase) {
            RelationCategory::DrsOperator
        } else if relation.chars().next().is_some_and(char::is_uppercase) {
            RelationCategory::SemanticRole
        } else {
            RelationCategory::Concept
        }
    }
}

/// One DRS condition: `box relation arg1 [arg2 [arg3]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Clause {
    #[serde(rename = "box")]
    box_label: Term,
    relation: String,
    args: Vec<Term>,
}

impl Clause {
    pub const MAX_ARGS: usize = 3;

    pub fn new(box_label: Term, relation: &str, args: Vec<Term>) -> Result<Self, DrsError> {
        if box_label.kind() != TermKind::BoxVariable {
            return Err(DrsError::BadVariableName {
                token: box_label.label().to_string(),
                expected: TermKind::BoxVariable,
            });
        }
        check_token(relation, "relation")?;
        if args.is_empty() || args.len() > Self::MAX_ARGS {
            return Err(DrsError::ArgCount(args.len()));
        }
        Ok(Clause { box_label, relation: relation.to_string(), args })
    }

    /// Builds a clause from whitespace-separated fields.
    pub fn from_fields<S: AsRef<str>>(fields: &[S]) -> Result<Self, DrsError> {
        if fields.len() < 3 {
            return Err(DrsError::ArgCount(fields.len().saturating_sub(2)));
        }
        let box_label = Term::parse(fields[0].as_ref())?;
        let args = fields[2..].iter().map(|f| Term::parse(f.as_ref())).collect::<Result<Vec<_>, _>>()?;
        Clause::new(box_label, fields[1].as_ref(), args)
    }

    pub fn box_label(&self) -> &Term {
        &self.box_label
    }

    pub fn relation(&self) -> &str {
        &self.relation
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }

    pub fn category(&self) -> RelationCategory {
        RelationCategory::of(&self.relation)
    }

    /// The clause's fields in order: box, relation, args.
    pub fn fields(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.box_label.label())
            .chain(std::iter::once(self.relation.as_str()))
            .chain(self.args.iter().map(Term::label))
    }

    /// All terms with their position (0 = box, 1.. = arguments).
    pub fn terms(&self) -> impl Iterator<Item = (usize, &Term)> {
        std::iter::once(&self.box_label).chain(self.args.iter()).enumerate()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for field in self.fields() {
            if !first {
                f.write_str(" ")?;
            }
            f.write_str(field)?;
            first = false;
        }
        Ok(())
    }
}

/// Where a variable occurs: clause index and field position (0 = box).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Occurrence {
    pub clause: usize,
    pub position: usize,
}

/// A DRS in clause form.
///
/// Duplicate clauses are dropped at construction; document order of the
/// first occurrence is kept for serialization. Equality compares the
/// clause lists.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ClauseSet {
    clauses: Vec<Clause>,
    #[serde(skip)]
    variables: BTreeMap<String, Vec<Occurrence>>,
    #[serde(skip)]
    duplicates_dropped: usize,
}

impl ClauseSet {
    pub fn new(clauses: impl IntoIterator<Item = Clause>) -> Self {
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        let mut duplicates_dropped = 0;
        for clause in clauses {
            if seen.contains(&clause) {
                duplicates_dropped += 1;
            } else {
                seen.insert(clause.clone());
                kept.push(clause);
            }
        }
        let mut variables: BTreeMap<String, Vec<Occurrence>> = BTreeMap::new();
        for (ci, clause) in kept.iter().enumerate() {
            for (position, term) in clause.terms() {
                if term.is_variable() {
                    variables
                        .entry(term.label().to_string())
                        .or_default()
                        .push(Occurrence { clause: ci, position });
                }
            }
        }
        ClauseSet { clauses: kept, variables, duplicates_dropped }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Number of duplicate clauses discarded while building the set.
    pub fn duplicates_dropped(&self) -> usize {
        self.duplicates_dropped
    }

    /// Variable name to every place it occurs.
    pub fn variables(&self) -> &BTreeMap<String, Vec<Occurrence>> {
        &self.variables
    }

    pub fn variables_of_kind(&self, kind: TermKind) -> impl Iterator<Item = &str> {
        self.variables
            .keys()
            .filter(move |v| super::term::classify(v) == kind)
            .map(String::as_str)
    }

    /// Order-insensitive comparison.
    pub fn same_set(&self, other: &ClauseSet) -> bool {
        self.len() == other.len() && {
            let mine: HashSet<&Clause> = self.clauses.iter().collect();
            other.clauses.iter().all(|c| mine.contains(c))
        }
    }
}

impl PartialEq for ClauseSet {
    fn eq(&self, other: &Self) -> bool {
        self.clauses == other.clauses
    }
}

impl Eq for ClauseSet {}

impl FromIterator<Clause> for ClauseSet {
    fn from_iter<T: IntoIterator<Item = Clause>>(iter: T) -> Self {
        ClauseSet::new(iter)
    }
}
