use crate::drs::{Clause, ClauseSet, Separator, SequentialGraph, SymbolSequence};
use crate::registry::Registry;
use crate::validate::ErrorClass;

use super::sbn::parse_item_tokens;
use super::IllFormed;

fn join_with_separator<I>(groups: I, sep: &Separator) -> SymbolSequence
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut tokens = Vec::new();
    for (i, group) in groups.into_iter().enumerate() {
        if i > 0 {
            tokens.push(sep.as_str().to_string());
        }
        tokens.extend(group);
    }
    SymbolSequence::new(tokens)
}

/// Clauses in document order, one token per field, separator between clauses.
pub fn linearize_clauses(set: &ClauseSet, sep: &Separator) -> SymbolSequence {
    join_with_separator(set.clauses().iter().map(|c| c.fields().map(str::to_string).collect()), sep)
}

/// Reads a model-produced clause sequence. Empty runs between separators
/// are skipped; arity is checked against `registry` for known relations.
pub fn delinearize_clauses(
    seq: &SymbolSequence,
    sep: &Separator,
    registry: &Registry,
) -> Result<ClauseSet, IllFormed> {
    let mut clauses = Vec::new();
    for (location, chunk) in seq.chunks(sep).enumerate() {
        let illegal = |detail: String| IllFormed { class: ErrorClass::IllegalClauseStructure, location, detail };
        if !(3..=5).contains(&chunk.len()) {
            return Err(illegal(format!("{} fields in {:?}", chunk.len(), chunk.join(" "))));
        }
        let clause = Clause::from_fields(chunk).map_err(|e| illegal(e.to_string()))?;
        if let Some(arity) = registry.arity(clause.relation()) {
            if arity != clause.args().len() {
                return Err(illegal(format!(
                    "{} takes {} argument(s), got {}",
                    clause.relation(),
                    arity,
                    clause.args().len()
                )));
            }
        }
        clauses.push(clause);
    }
    Ok(ClauseSet::new(clauses))
}

/// Items in order, each as head plus role/offset tokens, separator between items.
pub fn linearize_sbn(graph: &SequentialGraph, sep: &Separator) -> SymbolSequence {
    join_with_separator(graph.items.iter().map(|i| i.tokens()), sep)
}

/// Structural read of an item sequence. Offsets pointing outside the graph
/// are accepted here and reported by the validator.
pub fn delinearize_sbn(seq: &SymbolSequence, sep: &Separator) -> Result<SequentialGraph, IllFormed> {
    let items = seq
        .chunks(sep)
        .enumerate()
        .map(|(location, chunk)| {
            parse_item_tokens(chunk).map_err(|detail| IllFormed {
                class: ErrorClass::OffsetOutOfRange,
                location,
                detail: format!("malformed item: {detail}"),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SequentialGraph::new(items))
}
