use std::collections::{BTreeMap, HashMap, HashSet};

use super::matching::{Arg, Fact, Interner, Problem, Side};
use super::{Counts, MatchResult, MetricsError, Pred, SearchConfig};
use crate::drs::{Clause, ClauseSet, Term, TermKind};
use crate::registry::Registry;
use crate::validate::validate_clauses;

struct Encoded {
    side: Side,
    names: Vec<String>,
}

fn encode(set: &ClauseSet, interner: &mut Interner) -> Encoded {
    let mut index: HashMap<&str, u32> = HashMap::new();
    let mut names = Vec::new();
    let mut side = Side::default();
    for clause in set.clauses() {
        let label = interner.id(clause.relation());
        let args = clause
            .terms()
            .map(|(_, t)| {
                if t.is_variable() {
                    let next = names.len() as u32;
                    let v = *index.entry(t.label()).or_insert_with(|| {
                        names.push(t.label().to_string());
                        side.namespaces.push(if t.kind() == TermKind::BoxVariable { 0 } else { 1 });
                        next
                    });
                    Arg::Var(v)
                } else {
                    Arg::Const(interner.id(t.label()))
                }
            })
            .collect();
        side.facts.push(Fact { label, args });
    }
    Encoded { side, names }
}

/// Clause-level F1 under the best injective variable mapping.
///
/// Box and entity variables form separate namespaces. An ill-formed
/// prediction scores nothing and predicts nothing.
pub fn counter_f1<'a>(
    pred: impl Into<Pred<'a, ClauseSet>>,
    gold: &ClauseSet,
    search: &SearchConfig,
    registry: &Registry,
) -> Result<MatchResult, MetricsError> {
    let report = validate_clauses(gold, registry);
    if let Some(f) = report.errors().first() {
        return Err(MetricsError::GoldNotWellFormed(format!("{}: {}", f.class, f.detail)));
    }
    let pred = match pred.into() {
        Pred::Parsed(p) => p,
        Pred::IllFormed => return Ok(MatchResult::ill_formed(gold.len())),
    };
    Ok(match_sets(pred, gold, search))
}

/// Matching without validating gold.
pub(crate) fn match_sets(pred: &ClauseSet, gold: &ClauseSet, search: &SearchConfig) -> MatchResult {
    let mut interner = Interner::default();
    let p = encode(pred, &mut interner);
    let g = encode(gold, &mut interner);
    let solution = Problem::new(&p.side, &g.side).solve(search);
    let mapping = solution
        .mapping
        .iter()
        .enumerate()
        .filter_map(|(v, m)| m.map(|w| (p.names[v].clone(), g.names[w as usize].clone())))
        .collect();
    MatchResult { counts: Counts::new(solution.matched, pred.len(), gold.len()), mapping, exact: solution.exact }
}

/// The clause with every variable renamed through `mapping`, or `None` if
/// some variable is unmapped.
pub(crate) fn image(clause: &Clause, mapping: &BTreeMap<String, String>) -> Option<Clause> {
    let rename = |t: &Term| -> Option<Term> {
        if !t.is_variable() {
            return Some(t.clone());
        }
        let target = mapping.get(t.label())?;
        match t.kind() {
            TermKind::BoxVariable => Term::box_variable(target).ok(),
            _ => Term::entity_variable(target).ok(),
        }
    };
    let args = clause.args().iter().map(rename).collect::<Option<Vec<_>>>()?;
    Clause::new(rename(clause.box_label())?, clause.relation(), args).ok()
}

/// Number of prediction clauses whose image under `mapping` is a gold clause.
pub fn counter_facts_matched(pred: &ClauseSet, gold: &ClauseSet, mapping: &BTreeMap<String, String>) -> usize {
    let gold: HashSet<&Clause> = gold.clauses().iter().collect();
    pred.clauses().iter().filter(|c| image(c, mapping).is_some_and(|i| gold.contains(&i))).count()
}
