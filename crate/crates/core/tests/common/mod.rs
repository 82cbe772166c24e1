//! Reference implementations used as oracles. They share no code with the
//! search engine: everything is plain enumeration over string renderings.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;

use drskit::drs::{ClauseSet, DrsGraph, Edge, TermKind};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

/// Calls `f` on every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

fn render_clauses(set: &ClauseSet, rename: &dyn Fn(&str) -> String) -> Vec<String> {
    set.clauses()
        .iter()
        .map(|c| {
            let mut parts = vec![rename(c.box_label().label()), c.relation().to_string()];
            for a in c.args() {
                parts.push(if a.is_variable() { rename(a.label()) } else { a.label().to_string() });
            }
            parts.join(" ")
        })
        .collect()
}

/// Matched clauses of `pred` in `gold` under an explicit variable mapping.
/// Unmapped variables never match.
pub fn clauses_matched_under(pred: &ClauseSet, gold: &ClauseSet, mapping: &BTreeMap<String, String>) -> usize {
    let gold_lines: HashSet<String> = render_clauses(gold, &|v| v.to_string()).into_iter().collect();
    render_clauses(pred, &|v| mapping.get(v).cloned().unwrap_or_else(|| format!("?{v}")))
        .iter()
        .filter(|l| gold_lines.contains(*l))
        .count()
}

/// Best matched-clause count over every injective, kind-preserving
/// variable mapping: each kind's smaller side is padded with dummies and
/// all permutations are tried.
pub fn brute_force_counter(pred: &ClauseSet, gold: &ClauseSet) -> usize {
    let kinds = [TermKind::BoxVariable, TermKind::EntityVariable];
    let sides: Vec<(Vec<String>, Vec<String>)> = kinds
        .iter()
        .map(|&k| {
            let p: Vec<String> = pred.variables_of_kind(k).map(str::to_string).collect();
            let g: Vec<String> = gold.variables_of_kind(k).map(str::to_string).collect();
            (p, g)
        })
        .collect();
    let mut best = 0;
    let mut per_kind: Vec<Vec<Vec<(String, String)>>> = Vec::new();
    for (p, g) in &sides {
        let n = p.len().max(g.len());
        let mut options = Vec::new();
        for_each_permutation(n, |perm| {
            let pairs: Vec<(String, String)> = (0..p.len())
                .filter(|&i| perm[i] < g.len())
                .map(|i| (p[i].clone(), g[perm[i]].clone()))
                .collect();
            options.push(pairs);
        });
        per_kind.push(options);
    }
    for boxes in &per_kind[0] {
        for ents in &per_kind[1] {
            let mapping: BTreeMap<String, String> = boxes.iter().chain(ents).cloned().collect();
            best = best.max(clauses_matched_under(pred, gold, &mapping));
        }
    }
    best
}

fn triples(g: &DrsGraph, name: &dyn Fn(usize) -> String) -> Vec<String> {
    let mut out: Vec<String> = g.nodes().iter().enumerate().map(|(i, n)| format!("instance {} {}", n.label(), name(i))).collect();
    for e in g.edges() {
        out.push(match e {
            Edge::SemanticRole { from, to, role } => format!("role {role} {} {}", name(from.0), name(to.0)),
            Edge::DiscourseRelation { from, to, relation } => format!("drel {relation} {} {}", name(from.0), name(to.0)),
            Edge::Membership { predicate, box_node } => format!("in {} {}", name(predicate.0), name(box_node.0)),
        });
    }
    out
}

/// Matched triples when pred node `i` stands for gold node `map[i]`
/// (`None` for unmapped).
pub fn triples_matched_under(pred: &DrsGraph, gold: &DrsGraph, map: &[Option<usize>]) -> usize {
    let gold_set: HashSet<String> = triples(gold, &|i| format!("g{i}")).into_iter().collect();
    triples(pred, &|i| map[i].map_or(format!("p{i}"), |j| format!("g{j}")))
        .iter()
        .filter(|t| gold_set.contains(*t))
        .count()
}

/// Best matched-triple count over all bijections between the node sets,
/// the smaller one padded with dummy nodes.
pub fn brute_force_smatch(pred: &DrsGraph, gold: &DrsGraph) -> usize {
    let (p, g) = (pred.nodes().len(), gold.nodes().len());
    let n = p.max(g);
    let mut best = 0;
    for_each_permutation(n, |perm| {
        let map: Vec<Option<usize>> = (0..p).map(|i| (perm[i] < g).then_some(perm[i])).collect();
        best = best.max(triples_matched_under(pred, gold, &map));
    });
    best
}

/// Parses `n3` style node names.
pub fn node_index(name: &str) -> usize {
    name.trim_start_matches('n').parse().expect("node name")
}

pub fn node_mapping(pred: &DrsGraph, mapping: &BTreeMap<String, String>) -> Vec<Option<usize>> {
    (0..pred.nodes().len()).map(|i| mapping.get(&format!("n{i}")).map(|g| node_index(g))).collect()
}

/// Rank of a small dense matrix by Gaussian elimination with partial pivoting.
pub fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let (r, c) = (m.len(), m.first().map_or(0, Vec::len));
    let mut rank = 0;
    for col in 0..c {
        let Some(p) = (rank..r).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())) else { break };
        if m[p][col].abs() <= tol {
            continue;
        }
        m.swap(rank, p);
        for i in 0..r {
            if i != rank {
                let f = m[i][col] / m[rank][col];
                let pivot = m[rank].clone();
                for (x, y) in m[i][col..].iter_mut().zip(&pivot[col..]) {
                    *x -= f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}
