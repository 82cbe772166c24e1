//! Conversions between representation forms: clause set to graph, and
//! graph to and from the sequential (SBN) form.
//!
//! Presupposition boxes are merged into the box they attach to, so
//! interpretation positions are not kept in the graph. Graphs produced from
//! SBN have a single box, since items carry no box labels.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::drs::{
    ClauseSet, DrsGraph, Edge, GraphBuilder, GraphError, Item, ItemHead, Node, NodeId, Pos, RelationCategory,
    Satellite, SequentialGraph, SynsetId, Term, TermKind,
};
use crate::registry::{ArgKind, Registry};
use crate::validate::{validate_clauses, validate_sbn, ErrorClass, Finding, ValidationReport};

/// Relation whose box is folded into its argument box.
pub const PRESUPPOSITION: &str = "PRESUPPOSITION";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvertError {
    #[error("input is not well formed ({} finding(s))", .0.errors().len())]
    NotWellFormed(ValidationReport),
    #[error("variable {variable} is described by more than one concept")]
    MultipleConcepts { variable: String },
    #[error("clause {clause}: {detail}")]
    Unsupported { clause: usize, detail: String },
    #[error("clause {clause}: {error}")]
    Graph { clause: usize, error: GraphError },
    #[error("node {0} is missing from the item order")]
    NodeAbsentFromOrder(NodeId),
    #[error("node {0} in the item order is not a predicate or entity")]
    NotAnItem(NodeId),
    #[error("node {0} appears twice in the item order")]
    DuplicateInOrder(NodeId),
}

struct BoxClasses {
    parent: Vec<usize>,
    index: HashMap<String, usize>,
}

impl BoxClasses {
    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // the earlier box stays representative
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
    }

    fn id(&self, label: &str) -> usize {
        self.index[label]
    }
}

/// Erases variables: concepts become predicate nodes, constants become entity
/// nodes, roles and binary comparison operators become semantic-role edges,
/// box operators become discourse-relation edges.
///
/// Node order: box dummies, then one node per entity variable in order of
/// first appearance, then entity nodes for constants as they are met.
/// A variable without a concept becomes `entity.n.01`.
pub fn clauses_to_graph(set: &ClauseSet, registry: &Registry) -> Result<DrsGraph, ConvertError> {
    let report = validate_clauses(set, registry);
    if !report.well_formed() {
        return Err(ConvertError::NotWellFormed(report));
    }

    let mut labels: Vec<&str> = Vec::new();
    let mut order: Vec<&str> = Vec::new();
    let mut seen = BTreeSet::new();
    for clause in set.clauses() {
        for (_, term) in clause.terms() {
            if term.is_variable() && seen.insert(term.label()) {
                match term.kind() {
                    TermKind::BoxVariable => labels.push(term.label()),
                    _ => order.push(term.label()),
                }
            }
        }
    }
    let mut boxes = BoxClasses {
        parent: (0..labels.len()).collect(),
        index: labels.iter().enumerate().map(|(i, l)| (l.to_string(), i)).collect(),
    };
    for clause in set.clauses().iter().filter(|c| c.relation() == PRESUPPOSITION) {
        let (a, b) = (boxes.id(clause.box_label().label()), boxes.id(clause.args()[0].label()));
        boxes.union(a, b);
    }

    let mut builder = GraphBuilder::new();
    let mut box_nodes: HashMap<usize, NodeId> = HashMap::new();
    for i in 0..labels.len() {
        let root = boxes.find(i);
        if let std::collections::hash_map::Entry::Vacant(e) = box_nodes.entry(root) {
            e.insert(builder.box_dummy());
        }
    }
    let mut box_of = |label: &str| box_nodes[&boxes.find(boxes.id(label))];

    // concepts and binding boxes per variable
    let mut concept: HashMap<&str, (SynsetId, &str)> = HashMap::new();
    let mut binder: HashMap<&str, &str> = HashMap::new();
    for clause in set.clauses() {
        if clause.category() == RelationCategory::Concept && !registry.is_listed(clause.relation()) {
            let var = clause.args()[1].label();
            let synset = SynsetId::from_concept(clause.relation(), clause.args()[0].label())
                .expect("validated concept clause");
            if concept.insert(var, (synset, clause.box_label().label())).is_some() {
                return Err(ConvertError::MultipleConcepts { variable: var.to_string() });
            }
        } else if let Some(sig) = registry.signature(clause.relation()) {
            for (kind, arg) in sig.args.iter().zip(clause.args()) {
                if *kind == ArgKind::EntityBinding {
                    binder.entry(arg.label()).or_insert(clause.box_label().label());
                }
            }
        }
    }

    let fallback = SynsetId::new("entity", Pos::Noun, 1).expect("valid synset");
    let mut var_nodes: HashMap<&str, NodeId> = HashMap::new();
    for var in &order {
        let (synset, bx) = match concept.get(var) {
            Some((s, bx)) => (s.clone(), *bx),
            None => (fallback.clone(), binder.get(var).copied().expect("validated: variable is bound")),
        };
        let node = builder.predicate(synset, box_of(bx)).map_err(|error| ConvertError::Graph { clause: 0, error })?;
        var_nodes.insert(var, node);
    }

    for (ci, clause) in set.clauses().iter().enumerate() {
        if clause.category() == RelationCategory::Concept && !registry.is_listed(clause.relation()) {
            continue;
        }
        let sig = registry.signature(clause.relation()).expect("validated relation");
        if sig.args.iter().any(|k| k.binds()) || clause.relation() == PRESUPPOSITION {
            continue;
        }
        let graph_err = |error: GraphError| match error {
            GraphError::DuplicateRole { .. } => ConvertError::NotWellFormed(ValidationReport::new(vec![Finding {
                class: ErrorClass::DuplicateRole,
                location: ci,
                detail: error.to_string(),
            }])),
            error => ConvertError::Graph { clause: ci, error },
        };
        let args = clause.args();
        let all_boxes = args.iter().all(|a| a.kind() == TermKind::BoxVariable);
        let no_boxes = args.iter().all(|a| a.kind() != TermKind::BoxVariable);
        match args.len() {
            1 if all_boxes => {
                let (from, to) = (box_of(clause.box_label().label()), box_of(args[0].label()));
                if from != to {
                    builder.discourse(from, to, clause.relation()).map_err(graph_err)?;
                }
            }
            2 if all_boxes => {
                let (from, to) = (box_of(args[0].label()), box_of(args[1].label()));
                builder.discourse(from, to, clause.relation()).map_err(graph_err)?;
            }
            2 if no_boxes => {
                let mut node = |t: &Term| -> Result<NodeId, ConvertError> {
                    if t.is_variable() {
                        Ok(var_nodes[t.label()])
                    } else {
                        builder.entity(t.unquoted()).map_err(|error| ConvertError::Graph { clause: ci, error })
                    }
                };
                let from = node(&args[0])?;
                let to = node(&args[1])?;
                builder.role(from, to, clause.relation()).map_err(graph_err)?;
            }
            _ => {
                return Err(ConvertError::Unsupported {
                    clause: ci,
                    detail: format!("{} has no graph counterpart", clause.relation()),
                })
            }
        }
    }
    Ok(builder.build())
}

/// Deterministic item order for graphs without a surface order: Kahn's
/// topological sort over role edges, ties broken by node label then id.
/// Nodes on cycles are released lexicographically.
pub fn default_order(graph: &DrsGraph) -> Vec<NodeId> {
    let items = graph.item_nodes();
    let mut indegree: HashMap<NodeId, usize> = items.iter().map(|&n| (n, 0)).collect();
    for (_, to, _) in graph.role_edges() {
        *indegree.get_mut(&to).expect("role edges join items") += 1;
    }
    let key = |n: NodeId| (graph.node(n).label(), n);
    let mut remaining: BTreeSet<(String, NodeId)> = items.iter().map(|&n| key(n)).collect();
    let mut out = Vec::with_capacity(items.len());
    while !remaining.is_empty() {
        let next = remaining
            .iter()
            .find(|(_, n)| indegree[n] == 0)
            .or_else(|| remaining.iter().next())
            .cloned()
            .expect("non-empty");
        remaining.remove(&next);
        let node = next.1;
        out.push(node);
        for (from, to, _) in graph.role_edges() {
            if from == node {
                let d = indegree.get_mut(&to).expect("item");
                *d = d.saturating_sub(1);
            }
        }
    }
    out
}

/// One item per predicate or entity node in `order`; each outgoing
/// semantic-role edge becomes a satellite whose offset is the target's
/// position minus the source's. Box structure is not carried over.
pub fn graph_to_sbn(graph: &DrsGraph, order: Option<&[NodeId]>) -> Result<SequentialGraph, ConvertError> {
    let computed;
    let order = match order {
        Some(o) => o,
        None => {
            computed = default_order(graph);
            &computed
        }
    };
    let mut position: HashMap<NodeId, usize> = HashMap::with_capacity(order.len());
    for (i, &n) in order.iter().enumerate() {
        if n.0 >= graph.nodes().len() || !graph.node(n).is_item() {
            return Err(ConvertError::NotAnItem(n));
        }
        if position.insert(n, i).is_some() {
            return Err(ConvertError::DuplicateInOrder(n));
        }
    }
    if let Some(&missing) = graph.item_nodes().iter().find(|n| !position.contains_key(n)) {
        return Err(ConvertError::NodeAbsentFromOrder(missing));
    }
    let mut items: Vec<Item> = order
        .iter()
        .map(|&n| {
            let head = match graph.node(n) {
                Node::Predicate(s) => ItemHead::Synset(s.clone()),
                Node::Entity(e) => ItemHead::Constant(e.clone()),
                Node::BoxDummy(_) => unreachable!("checked above"),
            };
            Item::new(head)
        })
        .collect();
    for (from, to, role) in graph.role_edges() {
        let offset = position[&to] as i64 - position[&from] as i64;
        let sat = Satellite::new(role, offset).expect("role edges have distinct endpoints and valid labels");
        items[position[&from]].satellites.push(sat);
    }
    Ok(SequentialGraph::new(items))
}

/// Items become predicate (or entity) nodes attached to one default box;
/// satellites become semantic-role edges resolved by index arithmetic.
pub fn sbn_to_graph(seq: &SequentialGraph) -> Result<DrsGraph, ConvertError> {
    let report = validate_sbn(seq);
    if !report.well_formed() {
        return Err(ConvertError::NotWellFormed(report));
    }
    let mut builder = GraphBuilder::new();
    let default_box = seq.items.iter().any(|i| matches!(i.head, ItemHead::Synset(_))).then(|| builder.box_dummy());
    let mut nodes = Vec::with_capacity(seq.len());
    for (i, item) in seq.items.iter().enumerate() {
        let node = match &item.head {
            ItemHead::Synset(s) => builder.predicate(s.clone(), default_box.expect("box exists")),
            ItemHead::Constant(c) => builder.entity(c),
        }
        .map_err(|error| ConvertError::Graph { clause: i, error })?;
        nodes.push(node);
    }
    for (i, item) in seq.items.iter().enumerate() {
        for sat in &item.satellites {
            let target = (i as i64 + sat.offset()) as usize;
            builder
                .role(nodes[i], nodes[target], sat.role())
                .map_err(|error| ConvertError::Graph { clause: i, error })?;
        }
    }
    Ok(builder.build())
}

/// Drops the satellites that make a sequence ill-formed: offsets leaving the
/// sequence and repeated roles on one item. Items are kept.
pub fn salvage_sbn(seq: &SequentialGraph) -> SequentialGraph {
    let len = seq.len() as i64;
    let items = seq
        .items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let mut seen = std::collections::HashSet::new();
            let satellites = item
                .satellites
                .iter()
                .filter(|s| (0..len).contains(&(i as i64 + s.offset())) && seen.insert(s.role().to_string()))
                .cloned()
                .collect();
            Item { head: item.head.clone(), satellites }
        })
        .collect();
    SequentialGraph::new(items)
}

/// Counts semantic-role edges, for conservation checks.
pub fn role_edge_count(graph: &DrsGraph) -> usize {
    graph.edges().iter().filter(|e| matches!(e, Edge::SemanticRole { .. })).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{parse_clause_file, parse_sbn_file, ParseMode};

    const TOM: &str = "\
b1 REF x1
b1 Name x1 \"tom\"
b1 PRESUPPOSITION b2
b1 male \"n.02\" x1
b2 REF e1
b2 REF t1
b2 Agent e1 x1
b2 TPR t1 \"now\"
b2 Time e1 t1
b2 Theme e1 x2
b2 climb_up \"v.01\" e1
b2 time \"n.08\" t1
b3 REF x2
b3 PRESUPPOSITION b2
b3 telephone_pole \"n.02\" x2
";

    fn graph(text: &str) -> DrsGraph {
        clauses_to_graph(&parse_clause_file(text, ParseMode::Strict).unwrap(), Registry::bundled()).unwrap()
    }

    #[test]
    fn running_example() {
        let g = graph(TOM);
        let boxes = g.nodes().iter().filter(|n| matches!(n, Node::BoxDummy(_))).count();
        assert_eq!(boxes, 1, "presupposition boxes merge into one");
        let roles: Vec<(String, String, &str)> = g
            .role_edges()
            .map(|(a, b, r)| (g.node(a).label(), g.node(b).label(), r))
            .collect();
        assert!(roles.contains(&("climb_up.v.01".into(), "male.n.02".into(), "Agent")));
        assert!(roles.contains(&("male.n.02".into(), "\"tom\"".into(), "Name")));
        let sbn = graph_to_sbn(&g, Some(&g.item_nodes())).unwrap();
        assert_eq!(sbn.items[1].to_string(), "climb_up.v.01 Agent -1 Time +1 Theme +2");
    }

    #[test]
    fn small_graphs() {
        assert!(graph("").is_empty());
        let g = graph("b1 REF x1\nb1 dog \"n.01\" x1\nb2 REF x2\nb2 cat \"n.01\" x2\nb1 NOT b2\n");
        let memberships = g.edges().iter().filter(|e| matches!(e, Edge::Membership { .. })).count();
        assert_eq!(memberships, 2);
        assert_eq!(g.nodes().iter().filter(|n| matches!(n, Node::BoxDummy(_))).count(), 2);
        assert!(g.edges().iter().any(|e| matches!(e, Edge::DiscourseRelation { relation, .. } if relation == "NOT")));
    }

    #[test]
    fn errors() {
        let set = parse_clause_file("b1 Agent e1 x1", ParseMode::Lenient).unwrap();
        assert!(matches!(clauses_to_graph(&set, Registry::bundled()), Err(ConvertError::NotWellFormed(_))));
        let set = parse_clause_file("b1 REF x1\nb1 dog \"n.01\" x1\nb1 cat \"n.01\" x1", ParseMode::Strict).unwrap();
        assert!(matches!(clauses_to_graph(&set, Registry::bundled()), Err(ConvertError::MultipleConcepts { .. })));
        let bad = parse_sbn_file("a.n.01 Agent +5\nb.n.01\nc.n.01").unwrap();
        assert!(matches!(sbn_to_graph(&bad), Err(ConvertError::NotWellFormed(_))));
    }

    #[test]
    fn sbn_to_graph_resolves_offsets() {
        let s = parse_sbn_file("male.n.02\nclimb_up.v.01 Agent -1\n").unwrap();
        let g = sbn_to_graph(&s).unwrap();
        let edges: Vec<_> = g.role_edges().map(|(a, b, r)| (g.node(a).label(), g.node(b).label(), r)).collect();
        assert_eq!(edges, vec![("climb_up.v.01".to_string(), "male.n.02".to_string(), "Agent")]);
        assert_eq!(graph_to_sbn(&g, Some(&g.item_nodes())).unwrap(), s);
        assert!(sbn_to_graph(&SequentialGraph::default()).unwrap().is_empty());
    }

    #[test]
    fn order_checks() {
        let s = parse_sbn_file("a.n.01 Theme +1\nb.n.01\n").unwrap();
        let g = sbn_to_graph(&s).unwrap();
        let items = g.item_nodes();
        assert!(matches!(graph_to_sbn(&g, Some(&items[..1])), Err(ConvertError::NodeAbsentFromOrder(_))));
        assert!(matches!(graph_to_sbn(&g, Some(&[items[0], items[0]])), Err(ConvertError::DuplicateInOrder(_))));
        assert!(matches!(graph_to_sbn(&g, Some(&[NodeId(0), items[1]])), Err(ConvertError::NotAnItem(_))));
        let single = sbn_to_graph(&parse_sbn_file("dog.n.01").unwrap()).unwrap();
        assert_eq!(graph_to_sbn(&single, None).unwrap().items[0].to_string(), "dog.n.01");
    }

    #[test]
    fn default_order_is_topological() {
        let s = parse_sbn_file("z.n.01\ny.v.01 Agent -1\n").unwrap();
        let g = sbn_to_graph(&s).unwrap();
        let sbn = graph_to_sbn(&g, None).unwrap();
        assert_eq!(sbn.items[0].to_string(), "y.v.01 Agent +1");
    }
}
