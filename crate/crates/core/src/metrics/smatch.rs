use std::collections::BTreeMap;

use super::matching::{Arg, Fact, Interner, Problem, Side};
use super::{Counts, MatchResult, Pred, SearchConfig};
use crate::drs::{DrsGraph, Edge, NodeId};

fn encode(graph: &DrsGraph, interner: &mut Interner) -> Side {
    let mut side = Side {
        facts: Vec::new(),
        namespaces: graph.nodes().iter().map(|n| if n.is_item() { 0 } else { 1 }).collect(),
    };
    let var = |n: NodeId| Arg::Var(n.0 as u32);
    for (i, node) in graph.nodes().iter().enumerate() {
        let label = interner.id(&format!("instance:{}", node.label()));
        side.facts.push(Fact { label, args: vec![Arg::Var(i as u32)] });
    }
    for edge in graph.edges() {
        let (label, args) = match edge {
            Edge::SemanticRole { from, to, role } => (format!("role:{role}"), vec![var(*from), var(*to)]),
            Edge::DiscourseRelation { from, to, relation } => {
                (format!("discourse:{relation}"), vec![var(*from), var(*to)])
            }
            Edge::Membership { predicate, box_node } => ("in".to_string(), vec![var(*predicate), var(*box_node)]),
        };
        side.facts.push(Fact { label: interner.id(&label), args });
    }
    side
}

/// Triples a graph decomposes into: one per node, one per edge.
pub fn triple_count(graph: &DrsGraph) -> usize {
    graph.nodes().len() + graph.edges().len()
}

/// Triple-level F1 under the best node correspondence.
///
/// Item nodes only map to item nodes and box nodes to box nodes. Graphs are
/// valid by construction, so gold needs no further checking.
pub fn smatch_f1<'a>(pred: impl Into<Pred<'a, DrsGraph>>, gold: &DrsGraph, search: &SearchConfig) -> MatchResult {
    let pred = match pred.into() {
        Pred::Parsed(p) => p,
        Pred::IllFormed => return MatchResult::ill_formed(triple_count(gold)),
    };
    let mut interner = Interner::default();
    let p = encode(pred, &mut interner);
    let g = encode(gold, &mut interner);
    let solution = Problem::new(&p, &g).solve(search);
    let mapping: BTreeMap<String, String> = solution
        .mapping
        .iter()
        .enumerate()
        .filter_map(|(v, m)| m.map(|w| (NodeId(v).to_string(), NodeId(w as usize).to_string())))
        .collect();
    MatchResult {
        counts: Counts::new(solution.matched, triple_count(pred), triple_count(gold)),
        mapping,
        exact: solution.exact,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drs::{GraphBuilder, SynsetId};

    fn graph(swap: bool) -> DrsGraph {
        let mut b = GraphBuilder::new();
        let bx = b.box_dummy();
        let person = b.predicate("person.n.01".parse().unwrap(), bx).unwrap();
        let sense = if swap { "run.v.02" } else { "run.v.01" };
        let run = b.predicate(sense.parse::<SynsetId>().unwrap(), bx).unwrap();
        let now = b.entity("now").unwrap();
        b.role(run, person, "Agent").unwrap();
        b.role(run, now, "Time").unwrap();
        b.build()
    }

    #[test]
    fn identity_permutation_and_edit() {
        let g = graph(false);
        let cfg = SearchConfig::default();
        assert_eq!(smatch_f1(&g, &g, &cfg).f1(), 1.0);
        let p = g.permuted(&[3, 2, 0, 1]);
        let r = smatch_f1(&p, &g, &cfg);
        assert_eq!(r.f1(), 1.0);
        assert_eq!(r.mapping["n3"], "n0");
        let r = smatch_f1(&graph(true), &g, &cfg);
        // 4 instances + 2 memberships + 2 roles; only the run instance differs
        assert_eq!(r.counts, Counts::new(7, 8, 8));
        assert_eq!(smatch_f1(Pred::IllFormed, &g, &cfg).counts, Counts::new(0, 0, 8));
    }
}
