//! Variable-free graph form of a DRS.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::term::check_token;
use super::SynsetId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "label", rename_all = "kebab-case")]
pub enum Node {
    Predicate(SynsetId),
    Entity(String),
    BoxDummy(u32),
}

impl Node {
    /// Label used for instance triples. All box dummies share one label.
    pub fn label(&self) -> String {
        match self {
            Node::Predicate(s) => s.to_string(),
            Node::Entity(e) => format!("\"{e}\""),
            Node::BoxDummy(_) => "box".to_string(),
        }
    }

    pub fn is_item(&self) -> bool {
        !matches!(self, Node::BoxDummy(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Edge {
    SemanticRole { from: NodeId, to: NodeId, role: String },
    DiscourseRelation { from: NodeId, to: NodeId, relation: String },
    Membership { predicate: NodeId, box_node: NodeId },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("{edge} edge cannot connect {node}: {reason}")]
    EndpointKind { edge: &'static str, node: NodeId, reason: &'static str },
    #[error("node {node} already has a {role} edge")]
    DuplicateRole { node: NodeId, role: String },
    #[error("self loop on {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {0:?}")]
    DuplicateEdge(Edge),
    #[error("invalid label: {0}")]
    Label(String),
}

/// Predicate, entity and box-dummy nodes joined by semantic-role,
/// discourse-relation and membership edges. Only [`GraphBuilder`] creates
/// graphs, so the endpoint typing rules always hold.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DrsGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

impl DrsGraph {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Predicate and entity nodes, in id order.
    pub fn item_nodes(&self) -> Vec<NodeId> {
        self.nodes.iter().enumerate().filter(|(_, n)| n.is_item()).map(|(i, _)| NodeId(i)).collect()
    }

    pub fn role_edges(&self) -> impl Iterator<Item = (NodeId, NodeId, &str)> {
        self.edges.iter().filter_map(|e| match e {
            Edge::SemanticRole { from, to, role } => Some((*from, *to, role.as_str())),
            _ => None,
        })
    }

    /// Rebuilds the graph with node `i` moved to position `perm[i]`.
    /// Edge order is kept.
    pub fn permuted(&self, perm: &[usize]) -> DrsGraph {
        assert_eq!(perm.len(), self.nodes.len(), "permutation length");
        let mut nodes = vec![Node::BoxDummy(0); self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            nodes[perm[i]] = n.clone();
        }
        let map = |n: NodeId| NodeId(perm[n.0]);
        let edges = self
            .edges
            .iter()
            .map(|e| match e {
                Edge::SemanticRole { from, to, role } => {
                    Edge::SemanticRole { from: map(*from), to: map(*to), role: role.clone() }
                }
                Edge::DiscourseRelation { from, to, relation } => {
                    Edge::DiscourseRelation { from: map(*from), to: map(*to), relation: relation.clone() }
                }
                Edge::Membership { predicate, box_node } => {
                    Edge::Membership { predicate: map(*predicate), box_node: map(*box_node) }
                }
            })
            .collect();
        DrsGraph { nodes, edges }
    }
}

#[derive(Debug, Default)]
pub struct GraphBuilder {
    graph: DrsGraph,
    boxes: u32,
    roles: HashSet<(NodeId, String)>,
    edge_set: HashSet<Edge>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, node: Node) -> NodeId {
        self.graph.nodes.push(node);
        NodeId(self.graph.nodes.len() - 1)
    }

    fn get(&self, id: NodeId) -> Result<&Node, GraphError> {
        self.graph.nodes.get(id.0).ok_or(GraphError::UnknownNode(id))
    }

    pub fn box_dummy(&mut self) -> NodeId {
        let id = self.boxes;
        self.boxes += 1;
        self.push(Node::BoxDummy(id))
    }

    /// Adds a predicate together with its single membership edge.
    pub fn predicate(&mut self, synset: SynsetId, box_node: NodeId) -> Result<NodeId, GraphError> {
        if !matches!(self.get(box_node)?, Node::BoxDummy(_)) {
            return Err(GraphError::EndpointKind { edge: "membership", node: box_node, reason: "not a box" });
        }
        let id = self.push(Node::Predicate(synset));
        self.graph.edges.push(Edge::Membership { predicate: id, box_node });
        Ok(id)
    }

    pub fn entity(&mut self, label: &str) -> Result<NodeId, GraphError> {
        check_token(label, "entity").map_err(|e| GraphError::Label(e.to_string()))?;
        if label.contains('"') {
            return Err(GraphError::Label(format!("entity label {label} contains a quote")));
        }
        Ok(self.push(Node::Entity(label.to_string())))
    }

    fn add_edge(&mut self, edge: Edge) -> Result<(), GraphError> {
        if !self.edge_set.insert(edge.clone()) {
            return Err(GraphError::DuplicateEdge(edge));
        }
        self.graph.edges.push(edge);
        Ok(())
    }

    pub fn role(&mut self, from: NodeId, to: NodeId, role: &str) -> Result<(), GraphError> {
        check_token(role, "role").map_err(|e| GraphError::Label(e.to_string()))?;
        for n in [from, to] {
            if !self.get(n)?.is_item() {
                return Err(GraphError::EndpointKind { edge: "semantic-role", node: n, reason: "box dummy" });
            }
        }
        if from == to {
            return Err(GraphError::SelfLoop(from));
        }
        if !self.roles.insert((from, role.to_string())) {
            return Err(GraphError::DuplicateRole { node: from, role: role.to_string() });
        }
        self.add_edge(Edge::SemanticRole { from, to, role: role.to_string() })
    }

    pub fn discourse(&mut self, from: NodeId, to: NodeId, relation: &str) -> Result<(), GraphError> {
        check_token(relation, "relation").map_err(|e| GraphError::Label(e.to_string()))?;
        for n in [from, to] {
            if !matches!(self.get(n)?, Node::BoxDummy(_)) {
                return Err(GraphError::EndpointKind { edge: "discourse-relation", node: n, reason: "not a box" });
            }
        }
        if from == to {
            return Err(GraphError::SelfLoop(from));
        }
        self.add_edge(Edge::DiscourseRelation { from, to, relation: relation.to_string() })
    }

    pub fn node_count(&self) -> usize {
        self.graph.nodes.len()
    }

    pub fn build(self) -> DrsGraph {
        self.graph
    }
}
