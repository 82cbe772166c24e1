//! Well-formedness checks for clause sets and sequential graphs, and the
//! corpus-level ill-formed rate. Validation never fails: it reports.

use std::collections::HashSet;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::drs::{ClauseSet, RelationCategory, SequentialGraph, SynsetId};
use crate::format::IllFormed;
use crate::par::{self, Execution};
use crate::registry::Registry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorClass {
    IllegalClauseStructure,
    FreeVariable,
    OffsetOutOfRange,
    DuplicateRole,
    UnknownRelation,
}

impl ErrorClass {
    pub const ALL: [ErrorClass; 5] = [
        ErrorClass::IllegalClauseStructure,
        ErrorClass::FreeVariable,
        ErrorClass::OffsetOutOfRange,
        ErrorClass::DuplicateRole,
        ErrorClass::UnknownRelation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ErrorClass::IllegalClauseStructure => "illegal-clause-structure",
            ErrorClass::FreeVariable => "free-variable",
            ErrorClass::OffsetOutOfRange => "offset-out-of-range",
            ErrorClass::DuplicateRole => "duplicate-role",
            ErrorClass::UnknownRelation => "unknown-relation",
        }
    }
}

impl fmt::Display for ErrorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub class: ErrorClass,
    /// Clause or item index.
    pub location: usize,
    pub detail: String,
}

/// `well_formed` is true exactly when `errors` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    well_formed: bool,
    errors: Vec<Finding>,
}

impl ValidationReport {
    pub fn new(errors: Vec<Finding>) -> Self {
        ValidationReport { well_formed: errors.is_empty(), errors }
    }

    pub fn clean() -> Self {
        Self::new(Vec::new())
    }

    pub fn from_ill_formed(err: &IllFormed) -> Self {
        Self::new(vec![Finding { class: err.class, location: err.location, detail: err.detail.clone() }])
    }

    pub fn well_formed(&self) -> bool {
        self.well_formed
    }

    pub fn errors(&self) -> &[Finding] {
        &self.errors
    }

    pub fn classes(&self) -> Vec<ErrorClass> {
        self.errors.iter().map(|e| e.class).collect()
    }
}

/// Checks arity and argument kinds against `registry`, and flags free variables.
///
/// A variable is introduced when it is the box label of any clause or sits in
/// a binding position of its relation's signature (the argument of `REF`).
/// Every other variable occurrence is a use and must refer to an introduced
/// variable.
pub fn validate_clauses(set: &ClauseSet, registry: &Registry) -> ValidationReport {
    let mut introduced: HashSet<&str> = HashSet::new();
    for clause in set.clauses() {
        introduced.insert(clause.box_label().label());
        if let Some(sig) = registry.signature(clause.relation()) {
            for (kind, arg) in sig.args.iter().zip(clause.args()) {
                if kind.binds() && arg.is_variable() {
                    introduced.insert(arg.label());
                }
            }
        }
    }

    let mut errors = Vec::new();
    for (i, clause) in set.clauses().iter().enumerate() {
        let sig = registry.signature(clause.relation());
        match sig {
            None => errors.push(Finding {
                class: ErrorClass::UnknownRelation,
                location: i,
                detail: format!("unknown relation {}", clause.relation()),
            }),
            Some(sig) => {
                let structure = if sig.arity() != clause.args().len() {
                    Some(format!("{} takes {} argument(s), got {}", clause.relation(), sig.arity(), clause.args().len()))
                } else if let Some((kind, arg)) = sig.args.iter().zip(clause.args()).find(|(k, a)| !k.accepts(a)) {
                    Some(format!("{} argument {} does not fit kind '{}'", clause.relation(), arg, kind.letter()))
                } else if clause.category() == RelationCategory::Concept && !registry.is_listed(clause.relation()) {
                    SynsetId::from_concept(clause.relation(), clause.args()[0].label()).err().map(|e| e.to_string())
                } else {
                    None
                };
                if let Some(detail) = structure {
                    errors.push(Finding { class: ErrorClass::IllegalClauseStructure, location: i, detail });
                }
            }
        }
        let mut reported = HashSet::new();
        for (j, arg) in clause.args().iter().enumerate() {
            let binding = sig.and_then(|s| s.args.get(j)).is_some_and(|k| k.binds());
            if arg.is_variable() && !binding && !introduced.contains(arg.label()) && reported.insert(arg.label()) {
                errors.push(Finding {
                    class: ErrorClass::FreeVariable,
                    location: i,
                    detail: format!("free variable {}", arg.label()),
                });
            }
        }
    }
    ValidationReport::new(errors)
}

/// Flags offsets that leave `[0, len)` and items carrying a role twice.
pub fn validate_sbn(graph: &SequentialGraph) -> ValidationReport {
    let len = graph.len() as i64;
    let mut errors = Vec::new();
    for (i, item) in graph.items.iter().enumerate() {
        let mut roles = HashSet::new();
        for sat in &item.satellites {
            let target = i as i64 + sat.offset();
            if !(0..len).contains(&target) {
                errors.push(Finding {
                    class: ErrorClass::OffsetOutOfRange,
                    location: i,
                    detail: format!("{} {} from item {i} of {len}", sat.role(), sat.offset_token()),
                });
            }
            if !roles.insert(sat.role()) {
                errors.push(Finding {
                    class: ErrorClass::DuplicateRole,
                    location: i,
                    detail: format!("second {} satellite", sat.role()),
                });
            }
        }
    }
    ValidationReport::new(errors)
}

/// A percentage shown with two decimals, as in result tables.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Percent(pub f64);

impl Percent {
    pub fn of(part: usize, whole: usize) -> Percent {
        Percent(if whole == 0 { 0.0 } else { 100.0 * part as f64 / whole as f64 })
    }

    pub fn from_fraction(f: f64) -> Percent {
        Percent(100.0 * f)
    }

    /// Value rounded to two decimals.
    pub fn rounded(self) -> f64 {
        format!("{:.2}", self.0).parse().expect("formatted float")
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}", self.0)
    }
}

impl Serialize for Percent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.rounded())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidateError {
    #[error("no reports to aggregate")]
    EmptyInput,
}

/// Share of ill-formed reports, in percent.
pub fn if_rate(reports: &[ValidationReport]) -> Result<Percent, ValidateError> {
    if reports.is_empty() {
        return Err(ValidateError::EmptyInput);
    }
    let ill = reports.iter().filter(|r| !r.well_formed()).count();
    Ok(Percent::of(ill, reports.len()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DocumentReport {
    pub id: String,
    #[serde(flatten)]
    pub report: ValidationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusSummary {
    pub documents: usize,
    pub ill_formed: usize,
    pub if_percent: Percent,
}

/// Machine-readable validation output for a corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusValidation {
    pub schema: &'static str,
    pub documents: Vec<DocumentReport>,
    pub summary: CorpusSummary,
}

pub const VALIDATION_SCHEMA: &str = "drskit.validation/1";

/// Validates documents independently and aggregates them in input order.
pub fn validate_corpus<T, F>(docs: &[(String, T)], exec: Execution, check: F) -> Result<CorpusValidation, ValidateError>
where
    T: Sync,
    F: Fn(&T) -> ValidationReport + Sync + Send,
{
    let reports = par::map(exec, docs, |(_, doc)| check(doc));
    let rate = if_rate(&reports)?;
    let ill_formed = reports.iter().filter(|r| !r.well_formed()).count();
    Ok(CorpusValidation {
        schema: VALIDATION_SCHEMA,
        summary: CorpusSummary { documents: reports.len(), ill_formed, if_percent: rate },
        documents: docs.iter().zip(reports).map(|((id, _), report)| DocumentReport { id: id.clone(), report }).collect(),
    })
}
