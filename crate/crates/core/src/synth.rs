//! Seeded generators of well-formed structures, perturbations and single
//! fault injections, for property tests, benchmarks and demos.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::drs::{
    Clause, ClauseSet, DrsGraph, GraphBuilder, Item, ItemHead, NodeId, Pos, Satellite, SequentialGraph, SynsetId,
    Term, TermKind,
};
use crate::registry::Registry;
use crate::validate::ErrorClass;

const NOUNS: [&str; 4] = ["person", "dog", "city", "book"];
const VERBS: [&str; 3] = ["run", "see", "climb_up"];
const ADJECTIVES: [&str; 2] = ["quick", "red"];
const ADVERBS: [&str; 1] = ["slowly"];
const ROLES: [&str; 6] = ["Agent", "Theme", "Patient", "Time", "Location", "Attribute"];
const DISCOURSE: [&str; 3] = ["CONTINUATION", "CONTRAST", "RESULT"];
const CONSTANTS: [&str; 3] = ["now", "speaker", "2"];

fn pick<'a, R: Rng + ?Sized>(rng: &mut R, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).copied().expect("non-empty vocabulary")
}

/// A random synset from a small vocabulary, so collisions are common.
pub fn synset<R: Rng + ?Sized>(rng: &mut R) -> SynsetId {
    let (pos, lemmas): (Pos, &[&str]) = match rng.gen_range(0..10) {
        0..=4 => (Pos::Noun, &NOUNS),
        5..=7 => (Pos::Verb, &VERBS),
        8 => (Pos::Adjective, &ADJECTIVES),
        _ => (Pos::Adverb, &ADVERBS),
    };
    SynsetId::new(pick(rng, lemmas), pos, rng.gen_range(1..=2)).expect("vocabulary is valid")
}

/// A uniformly random permutation of `0..n`.
pub fn permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

#[derive(Debug, Clone, Copy)]
pub struct ClauseGen {
    pub max_boxes: usize,
    pub max_entities: usize,
    pub max_roles: usize,
}

impl Default for ClauseGen {
    fn default() -> Self {
        ClauseGen { max_boxes: 2, max_entities: 3, max_roles: 4 }
    }
}

fn term(label: &str) -> Term {
    Term::parse(label).expect("generated terms are valid")
}

fn clause(b: &str, rel: &str, args: &[&str]) -> Clause {
    Clause::new(term(b), rel, args.iter().map(|a| term(a)).collect()).expect("generated clauses are valid")
}

fn quoted(s: &str) -> String {
    format!("\"{s}\"")
}

/// A well-formed clause set with at most `max_boxes + max_entities`
/// variables. Every box labels some clause and every entity has a REF.
pub fn clause_set<R: Rng + ?Sized>(rng: &mut R, gen: &ClauseGen) -> ClauseSet {
    let boxes = rng.gen_range(1..=gen.max_boxes.max(1));
    let entities = rng.gen_range(boxes.min(gen.max_entities).max(1)..=gen.max_entities.max(1));
    let bname = |i: usize| format!("b{}", i + 1);
    let mut out = Vec::new();
    let mut names = Vec::new();
    for i in 0..entities {
        let s = synset(rng);
        let name = if s.pos() == Pos::Verb { format!("e{}", i + 1) } else { format!("x{}", i + 1) };
        let b = bname(if i < boxes { i } else { rng.gen_range(0..boxes) });
        out.push(clause(&b, "REF", &[&name]));
        out.push(clause(&b, s.lemma(), &[&s.sense_constant(), &name]));
        names.push((name, b));
    }
    for j in 1..boxes {
        if rng.gen_bool(0.5) {
            out.push(clause(&bname(0), "NOT", &[&bname(j)]));
        } else {
            out.push(clause(&bname(0), pick(rng, &DISCOURSE), &[&bname(0), &bname(j)]));
        }
    }
    for _ in 0..rng.gen_range(0..=gen.max_roles) {
        let (a, b) = names.choose(rng).expect("at least one entity").clone();
        let role = pick(rng, &ROLES);
        if rng.gen_bool(0.3) || names.len() == 1 {
            out.push(clause(&b, role, &[&a, &quoted(pick(rng, &CONSTANTS))]));
        } else {
            let (c, _) = names.iter().filter(|(n, _)| *n != a).collect::<Vec<_>>().choose(rng).copied().expect("two").clone();
            out.push(clause(&b, role, &[&a, &c]));
        }
    }
    ClauseSet::new(out)
}

/// Renames every variable to a fresh, randomly assigned name of its kind.
pub fn rename_variables<R: Rng + ?Sized>(rng: &mut R, set: &ClauseSet) -> ClauseSet {
    let vars: Vec<&String> = set.variables().keys().collect();
    let fresh = permutation(rng, vars.len());
    let map: BTreeMap<&str, String> = vars
        .iter()
        .zip(fresh)
        .map(|(v, n)| {
            let prefix = if crate::drs::classify(v) == TermKind::BoxVariable { "b" } else { "v" };
            (v.as_str(), format!("{prefix}{}", n + 100))
        })
        .collect();
    let rename = |t: &Term| if t.is_variable() { term(&map[t.label()]) } else { t.clone() };
    set.clauses()
        .iter()
        .map(|c| Clause::new(rename(c.box_label()), c.relation(), c.args().iter().map(rename).collect()).expect("valid"))
        .collect()
}

/// Applies `edits` random edits (relabel, drop, redirect, add) and renames
/// variables. The result may be ill-formed but uses no new variables.
pub fn perturb_clauses<R: Rng + ?Sized>(rng: &mut R, set: &ClauseSet, edits: usize) -> ClauseSet {
    let mut clauses: Vec<Clause> = set.clauses().to_vec();
    let entity_vars: Vec<String> = set.variables_of_kind(TermKind::EntityVariable).map(str::to_string).collect();
    for _ in 0..edits {
        if clauses.is_empty() {
            break;
        }
        let i = rng.gen_range(0..clauses.len());
        let c = clauses[i].clone();
        match rng.gen_range(0..4) {
            0 => {
                let rel = match c.category() {
                    crate::drs::RelationCategory::SemanticRole => pick(rng, &ROLES).to_string(),
                    crate::drs::RelationCategory::Concept => synset(rng).lemma().to_string(),
                    _ => c.relation().to_string(),
                };
                clauses[i] = Clause::new(c.box_label().clone(), &rel, c.args().to_vec()).expect("valid");
            }
            1 => {
                clauses.remove(i);
            }
            2 => {
                let mut args = c.args().to_vec();
                if let Some(pos) = args.iter().position(|a| a.kind() == TermKind::EntityVariable) {
                    if let Some(v) = entity_vars.choose(rng) {
                        args[pos] = term(v);
                    }
                }
                clauses[i] = Clause::new(c.box_label().clone(), c.relation(), args).expect("valid");
            }
            _ => {
                if entity_vars.len() >= 2 {
                    let a = entity_vars.choose(rng).expect("non-empty");
                    let b = entity_vars.choose(rng).expect("non-empty");
                    clauses.push(clause(c.box_label().label(), pick(rng, &ROLES), &[a, b]));
                }
            }
        }
    }
    rename_variables(rng, &ClauseSet::new(clauses))
}

#[derive(Debug, Clone, Copy)]
pub struct GraphGen {
    pub max_nodes: usize,
    pub max_boxes: usize,
    pub max_roles: usize,
}

impl Default for GraphGen {
    fn default() -> Self {
        GraphGen { max_nodes: 6, max_boxes: 2, max_roles: 5 }
    }
}

/// Editable description of a graph, built in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSpec {
    pub boxes: usize,
    /// Synset items with their box, or entity constants (no box).
    pub items: Vec<(ItemHead, Option<usize>)>,
    pub roles: Vec<(usize, usize, String)>,
    pub discourse: Vec<(usize, usize, String)>,
}

impl GraphSpec {
    /// Builds the graph, skipping edges the builder rejects.
    pub fn build(&self) -> DrsGraph {
        let mut b = GraphBuilder::new();
        let boxes: Vec<NodeId> = (0..self.boxes).map(|_| b.box_dummy()).collect();
        let items: Vec<NodeId> = self
            .items
            .iter()
            .map(|(head, bx)| match head {
                ItemHead::Synset(s) => b.predicate(s.clone(), boxes[bx.unwrap_or(0)]).expect("box exists"),
                ItemHead::Constant(c) => b.entity(c).expect("plain constant"),
            })
            .collect();
        for (from, to, role) in &self.roles {
            let _ = b.role(items[*from], items[*to], role);
        }
        for (from, to, rel) in &self.discourse {
            let _ = b.discourse(boxes[*from], boxes[*to], rel);
        }
        b.build()
    }
}

pub fn graph_spec<R: Rng + ?Sized>(rng: &mut R, gen: &GraphGen) -> GraphSpec {
    let boxes = rng.gen_range(1..=gen.max_boxes.min(gen.max_nodes.saturating_sub(1)).max(1));
    let n_items = rng.gen_range(1..=gen.max_nodes.saturating_sub(boxes).max(1));
    let items: Vec<(ItemHead, Option<usize>)> = (0..n_items)
        .map(|_| {
            if rng.gen_bool(0.2) {
                (ItemHead::Constant(pick(rng, &CONSTANTS).to_string()), None)
            } else {
                (ItemHead::Synset(synset(rng)), Some(rng.gen_range(0..boxes)))
            }
        })
        .collect();
    let mut roles = Vec::new();
    if n_items >= 2 {
        for _ in 0..rng.gen_range(0..=gen.max_roles) {
            let from = rng.gen_range(0..n_items);
            let to = (from + rng.gen_range(1..n_items)) % n_items;
            roles.push((from, to, pick(rng, &ROLES).to_string()));
        }
    }
    let discourse = (1..boxes).map(|j| (0, j, pick(rng, &DISCOURSE).to_string())).collect();
    GraphSpec { boxes, items, roles, discourse }
}

/// A well-formed graph with at most `max_nodes` nodes.
pub fn graph<R: Rng + ?Sized>(rng: &mut R, gen: &GraphGen) -> DrsGraph {
    graph_spec(rng, gen).build()
}

/// Applies random label and edge edits, then permutes node ids.
pub fn perturb_graph<R: Rng + ?Sized>(rng: &mut R, spec: &GraphSpec, edits: usize) -> DrsGraph {
    let mut s = spec.clone();
    let n = s.items.len();
    for _ in 0..edits {
        match rng.gen_range(0..4) {
            0 => {
                let i = rng.gen_range(0..n);
                if let ItemHead::Synset(_) = s.items[i].0 {
                    s.items[i].0 = ItemHead::Synset(synset(rng));
                }
            }
            1 if !s.roles.is_empty() => {
                let i = rng.gen_range(0..s.roles.len());
                s.roles.remove(i);
            }
            2 if !s.roles.is_empty() && n >= 2 => {
                let i = rng.gen_range(0..s.roles.len());
                let from = s.roles[i].0;
                s.roles[i].1 = (from + rng.gen_range(1..n)) % n;
            }
            _ if n >= 2 => {
                let from = rng.gen_range(0..n);
                s.roles.push((from, (from + rng.gen_range(1..n)) % n, pick(rng, &ROLES).to_string()));
            }
            _ => {}
        }
    }
    let g = s.build();
    let perm = permutation(rng, g.nodes().len());
    g.permuted(&perm)
}

#[derive(Debug, Clone, Copy)]
pub struct SbnGen {
    pub max_items: usize,
    pub max_satellites: usize,
}

impl Default for SbnGen {
    fn default() -> Self {
        SbnGen { max_items: 8, max_satellites: 3 }
    }
}

/// A well-formed sequential graph: in-range offsets, distinct roles per item.
pub fn sbn<R: Rng + ?Sized>(rng: &mut R, gen: &SbnGen) -> SequentialGraph {
    let n = rng.gen_range(1..=gen.max_items.max(1));
    let items = (0..n)
        .map(|i| {
            let head = if rng.gen_bool(0.15) {
                ItemHead::Constant(pick(rng, &CONSTANTS).to_string())
            } else {
                ItemHead::Synset(synset(rng))
            };
            let mut item = Item::new(head);
            if n >= 2 {
                let mut roles = ROLES.to_vec();
                roles.shuffle(rng);
                for role in roles.into_iter().take(rng.gen_range(0..=gen.max_satellites)) {
                    let target = (i + rng.gen_range(1..n)) % n;
                    item = item.with(role, target as i64 - i as i64).expect("nonzero offset");
                }
            }
            item
        })
        .collect();
    SequentialGraph::new(items)
}

/// A structure with one injected fault, and where it was injected.
#[derive(Debug, Clone, PartialEq)]
pub struct Injected<T> {
    pub doc: T,
    pub class: ErrorClass,
    pub location: usize,
}

/// Breaks one clause of a well-formed set. Supports illegal clause
/// structure (an argument too many or too few) and free variables (a use
/// replaced by an unbound variable). `None` when no clause qualifies.
pub fn inject_clause_fault<R: Rng + ?Sized>(
    rng: &mut R,
    set: &ClauseSet,
    class: ErrorClass,
    registry: &Registry,
) -> Option<Injected<ClauseSet>> {
    let mut clauses = set.clauses().to_vec();
    let location = match class {
        ErrorClass::IllegalClauseStructure => {
            let i = rng.gen_range(0..clauses.len());
            let c = &clauses[i];
            let mut args = c.args().to_vec();
            if args.len() < 3 {
                args.push(term("\"extra\""));
            } else {
                args.pop();
            }
            clauses[i] = Clause::new(c.box_label().clone(), c.relation(), args).ok()?;
            i
        }
        ErrorClass::FreeVariable => {
            let mut candidates = Vec::new();
            for (i, c) in clauses.iter().enumerate() {
                let sig = registry.signature(c.relation())?;
                for (j, (kind, arg)) in sig.args.iter().zip(c.args()).enumerate() {
                    if arg.is_variable() && !kind.binds() {
                        candidates.push((i, j));
                    }
                }
            }
            let &(i, j) = candidates.choose(rng)?;
            let c = &clauses[i];
            let mut args = c.args().to_vec();
            args[j] = term(if args[j].kind() == TermKind::BoxVariable { "b999" } else { "x999" });
            clauses[i] = Clause::new(c.box_label().clone(), c.relation(), args).ok()?;
            i
        }
        _ => return None,
    };
    Some(Injected { doc: ClauseSet::new(clauses), class, location })
}

/// Breaks one item of a well-formed sequence: an offset leaving the
/// sequence, or a role repeated on one item.
pub fn inject_sbn_fault<R: Rng + ?Sized>(
    rng: &mut R,
    seq: &SequentialGraph,
    class: ErrorClass,
) -> Option<Injected<SequentialGraph>> {
    let mut items = seq.items.clone();
    let n = items.len() as i64;
    let i = rng.gen_range(0..items.len());
    let pos = i as i64;
    match class {
        ErrorClass::OffsetOutOfRange => {
            let k = rng.gen_range(0..3);
            let offset = if rng.gen_bool(0.5) { n - pos + k } else { -(pos + 1 + k) };
            let item = &mut items[i];
            if item.satellites.is_empty() || rng.gen_bool(0.3) {
                let used: Vec<&str> = item.satellites.iter().map(Satellite::role).collect();
                let role = ROLES.iter().find(|r| !used.contains(r))?;
                item.satellites.push(Satellite::new(role, offset).ok()?);
            } else {
                let s = rng.gen_range(0..item.satellites.len());
                let role = item.satellites[s].role().to_string();
                item.satellites[s] = Satellite::new(&role, offset).ok()?;
            }
        }
        ErrorClass::DuplicateRole => {
            if n < 2 {
                return None;
            }
            let valid = |rng: &mut R| (i as i64 + rng.gen_range(1..n)) % n - pos;
            let item = &mut items[i];
            let role = match item.satellites.choose(rng) {
                Some(s) => s.role().to_string(),
                None => {
                    let role = pick(rng, &ROLES).to_string();
                    let off = valid(rng);
                    item.satellites.push(Satellite::new(&role, off).ok()?);
                    role
                }
            };
            let off = valid(rng);
            item.satellites.push(Satellite::new(&role, off).ok()?);
        }
        _ => return None,
    }
    Some(Injected { doc: SequentialGraph::new(items), class, location: i })
}
