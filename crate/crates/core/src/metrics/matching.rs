//! Maximum-overlap matching between two sets of facts over variables.
//!
//! Clause sets and graphs are both reduced to facts `label(arg, ...)` whose
//! arguments are variables (split into namespaces) or constants. A mapping
//! sends prediction variables injectively to gold variables of the same
//! namespace; a prediction fact matches when its image is a gold fact. The
//! search maximizes matched facts, exhaustively for small problems and by
//! hill climbing otherwise.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::SearchConfig;

const CONST_BIT: u32 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Arg {
    Var(u32),
    Const(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Fact {
    pub label: u32,
    pub args: Vec<Arg>,
}

/// One side of a matching problem.
#[derive(Debug, Clone, Default)]
pub(crate) struct Side {
    pub facts: Vec<Fact>,
    /// Namespace of each variable.
    pub namespaces: Vec<u8>,
}

/// Variable reassignments making up one hill-climbing step.
type Moves = Vec<(usize, Option<u32>)>;

impl Side {
    pub fn var_count(&self) -> usize {
        self.namespaces.len()
    }
}

/// Interns labels and constants shared by both sides.
#[derive(Debug, Default)]
pub(crate) struct Interner {
    map: HashMap<String, u32>,
}

impl Interner {
    pub fn id(&mut self, s: &str) -> u32 {
        let next = self.map.len() as u32;
        *self.map.entry(s.to_string()).or_insert(next)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Solution {
    /// Gold variable for each prediction variable.
    pub mapping: Vec<Option<u32>>,
    pub matched: usize,
    pub exact: bool,
}

pub(crate) struct Problem<'a> {
    pred: &'a Side,
    gold: &'a Side,
    gold_keys: HashSet<Vec<u32>>,
    facts_by_var: Vec<Vec<usize>>,
    ns_count: usize,
}

fn key_into(buf: &mut Vec<u32>, fact: &Fact, map: impl Fn(u32) -> Option<u32>) -> bool {
    buf.clear();
    buf.push(fact.label);
    for a in &fact.args {
        match *a {
            Arg::Const(c) => buf.push(c | CONST_BIT),
            Arg::Var(v) => match map(v) {
                Some(g) => buf.push(g),
                None => return false,
            },
        }
    }
    true
}

impl<'a> Problem<'a> {
    pub fn new(pred: &'a Side, gold: &'a Side) -> Self {
        let mut gold_keys = HashSet::with_capacity(gold.facts.len());
        let mut buf = Vec::new();
        for f in &gold.facts {
            key_into(&mut buf, f, Some);
            gold_keys.insert(buf.clone());
        }
        let mut facts_by_var = vec![Vec::new(); pred.var_count()];
        for (i, f) in pred.facts.iter().enumerate() {
            for a in &f.args {
                if let Arg::Var(v) = *a {
                    let list = &mut facts_by_var[v as usize];
                    if list.last() != Some(&i) {
                        list.push(i);
                    }
                }
            }
        }
        let ns_count = pred.namespaces.iter().chain(&gold.namespaces).map(|&n| n as usize + 1).max().unwrap_or(0);
        Problem { pred, gold, gold_keys, facts_by_var, ns_count }
    }

    fn fact_matches(&self, buf: &mut Vec<u32>, fact: usize, mapping: &[Option<u32>]) -> bool {
        key_into(buf, &self.pred.facts[fact], |v| mapping[v as usize]) && self.gold_keys.contains(buf.as_slice())
    }

    /// Matched fact count under `mapping`.
    pub fn score(&self, mapping: &[Option<u32>]) -> usize {
        let mut buf = Vec::new();
        (0..self.pred.facts.len()).filter(|&f| self.fact_matches(&mut buf, f, mapping)).count()
    }

    pub fn solve(&self, config: &SearchConfig) -> Solution {
        let vars = self.pred.var_count().max(self.gold.var_count());
        if vars <= config.exact_threshold {
            self.exhaustive()
        } else {
            self.hill_climb(config)
        }
    }

    fn gold_by_ns(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.ns_count];
        for (g, &ns) in self.gold.namespaces.iter().enumerate() {
            out[ns as usize].push(g as u32);
        }
        out
    }

    fn pred_by_ns(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.ns_count];
        for (v, &ns) in self.pred.namespaces.iter().enumerate() {
            out[ns as usize].push(v);
        }
        out
    }

    /// Depth-first search over injective mappings with a counting bound.
    /// Prediction variables are assigned in index order, candidates in
    /// ascending gold index, unmapped last; only strictly better solutions
    /// replace the incumbent, so ties resolve to the lowest indices.
    pub fn exhaustive(&self) -> Solution {
        let p = self.pred.var_count();
        // facts become decided once their highest-indexed variable is set
        let mut decided_at: Vec<Vec<usize>> = vec![Vec::new(); p + 1];
        let mut buf = Vec::new();
        let plausible: Vec<bool> = self
            .pred
            .facts
            .iter()
            .map(|f| {
                self.gold.facts.iter().any(|g| {
                    g.label == f.label
                        && g.args.len() == f.args.len()
                        && g.args.iter().zip(&f.args).all(|(a, b)| match (a, b) {
                            (Arg::Const(x), Arg::Const(y)) => x == y,
                            (Arg::Var(x), Arg::Var(y)) => {
                                self.gold.namespaces[*x as usize] == self.pred.namespaces[*y as usize]
                            }
                            _ => false,
                        })
                })
            })
            .collect();
        let mut base = 0;
        for (i, f) in self.pred.facts.iter().enumerate() {
            let last = f.args.iter().filter_map(|a| if let Arg::Var(v) = a { Some(*v as usize + 1) } else { None }).max();
            match last {
                None => {
                    if self.fact_matches(&mut buf, i, &[]) {
                        base += 1;
                    }
                }
                Some(d) if plausible[i] => decided_at[d].push(i),
                Some(_) => {}
            }
        }
        // potential[d] = plausible facts decided at depth > d
        let mut potential = vec![0usize; p + 2];
        for d in (0..=p).rev() {
            potential[d] = potential[d + 1] + if d < p { decided_at[d + 1].len() } else { 0 };
        }

        let gold_ns = self.gold_by_ns();
        let pred_ns = self.pred_by_ns();
        let mut unmapped_budget: Vec<usize> =
            (0..self.ns_count).map(|n| pred_ns[n].len().saturating_sub(gold_ns[n].len())).collect();

        struct State {
            mapping: Vec<Option<u32>>,
            used: Vec<bool>,
            best: Option<(usize, Vec<Option<u32>>)>,
            buf: Vec<u32>,
        }
        let mut st = State {
            mapping: vec![None; p],
            used: vec![false; self.gold.var_count()],
            best: None,
            buf: Vec::new(),
        };

        #[allow(clippy::too_many_arguments)]
        fn dfs(
            pb: &Problem<'_>,
            st: &mut State,
            depth: usize,
            matched: usize,
            decided_at: &[Vec<usize>],
            potential: &[usize],
            gold_ns: &[Vec<u32>],
            budget: &mut [usize],
        ) {
            if let Some((best, _)) = &st.best {
                if matched + potential[depth] <= *best {
                    return;
                }
            }
            if depth == pb.pred.var_count() {
                st.best = Some((matched, st.mapping.clone()));
                return;
            }
            let ns = pb.pred.namespaces[depth] as usize;
            let try_value = |st: &mut State, value: Option<u32>, budget: &mut [usize]| {
                st.mapping[depth] = value;
                let mut gained = 0;
                for &f in &decided_at[depth + 1] {
                    let mut buf = std::mem::take(&mut st.buf);
                    if pb.fact_matches(&mut buf, f, &st.mapping) {
                        gained += 1;
                    }
                    st.buf = buf;
                }
                dfs(pb, st, depth + 1, matched + gained, decided_at, potential, gold_ns, budget);
                st.mapping[depth] = None;
            };
            for &g in &gold_ns[ns] {
                if !st.used[g as usize] {
                    st.used[g as usize] = true;
                    try_value(st, Some(g), budget);
                    st.used[g as usize] = false;
                }
            }
            if budget[ns] > 0 {
                budget[ns] -= 1;
                try_value(st, None, budget);
                budget[ns] += 1;
            }
        }

        dfs(self, &mut st, 0, base, &decided_at, &potential, &gold_ns, &mut unmapped_budget);
        let (matched, mapping) = st.best.expect("at least one complete assignment");
        Solution { mapping, matched, exact: true }
    }

    fn greedy_start(&self) -> Vec<Option<u32>> {
        let p = self.pred.var_count();
        let mut by_label: HashMap<(u32, usize), Vec<&Fact>> = HashMap::new();
        for g in &self.gold.facts {
            by_label.entry((g.label, g.args.len())).or_default().push(g);
        }
        let mut compat: HashMap<(u32, u32), usize> = HashMap::new();
        for f in &self.pred.facts {
            let Some(candidates) = by_label.get(&(f.label, f.args.len())) else { continue };
            for g in candidates {
                for (a, b) in f.args.iter().zip(&g.args) {
                    if let (Arg::Var(v), Arg::Var(w)) = (*a, *b) {
                        if self.pred.namespaces[v as usize] == self.gold.namespaces[w as usize] {
                            *compat.entry((v, w)).or_default() += 1;
                        }
                    }
                }
            }
        }
        let mut pairs: Vec<((u32, u32), usize)> = compat.into_iter().collect();
        pairs.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut mapping = vec![None; p];
        let mut used = vec![false; self.gold.var_count()];
        for ((v, w), _) in pairs {
            if mapping[v as usize].is_none() && !used[w as usize] {
                mapping[v as usize] = Some(w);
                used[w as usize] = true;
            }
        }
        let gold_ns = self.gold_by_ns();
        for (slot, &ns) in mapping.iter_mut().zip(&self.pred.namespaces) {
            if slot.is_none() {
                if let Some(&w) = gold_ns[ns as usize].iter().find(|&&w| !used[w as usize]) {
                    *slot = Some(w);
                    used[w as usize] = true;
                }
            }
        }
        mapping
    }

    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<Option<u32>> {
        let mut mapping = vec![None; self.pred.var_count()];
        let mut gold_ns = self.gold_by_ns();
        let mut pred_ns = self.pred_by_ns();
        for ns in 0..self.ns_count {
            gold_ns[ns].shuffle(rng);
            pred_ns[ns].shuffle(rng);
            for (&v, &w) in pred_ns[ns].iter().zip(&gold_ns[ns]) {
                mapping[v] = Some(w);
            }
        }
        mapping
    }

    /// Matched count change if the given variables took the given values.
    fn delta(&self, mapping: &mut [Option<u32>], changes: &[(usize, Option<u32>)], stamp: &mut [u32], tick: u32) -> i64 {
        let mut buf = Vec::new();
        let mut affected = Vec::new();
        for &(v, _) in changes {
            for &f in &self.facts_by_var[v] {
                if stamp[f] != tick {
                    stamp[f] = tick;
                    affected.push(f);
                }
            }
        }
        let before = affected.iter().filter(|&&f| self.fact_matches(&mut buf, f, mapping)).count() as i64;
        let saved: Vec<Option<u32>> = changes.iter().map(|&(v, _)| mapping[v]).collect();
        for &(v, val) in changes {
            mapping[v] = val;
        }
        let after = affected.iter().filter(|&&f| self.fact_matches(&mut buf, f, mapping)).count() as i64;
        for (&(v, _), old) in changes.iter().zip(saved) {
            mapping[v] = old;
        }
        after - before
    }

    /// Steepest-ascent climb over reassignments and swaps.
    fn climb(&self, mut mapping: Vec<Option<u32>>) -> (Vec<Option<u32>>, usize) {
        let p = self.pred.var_count();
        let gold_ns = self.gold_by_ns();
        let mut owner: Vec<Option<usize>> = vec![None; self.gold.var_count()];
        for (v, m) in mapping.iter().enumerate() {
            if let Some(w) = m {
                owner[*w as usize] = Some(v);
            }
        }
        let mut score = self.score(&mapping);
        let mut stamp = vec![0u32; self.pred.facts.len()];
        let mut tick = 0u32;
        loop {
            let mut best: Option<(i64, Moves)> = None;
            for v in 0..p {
                let ns = self.pred.namespaces[v] as usize;
                for &w in &gold_ns[ns] {
                    if mapping[v] == Some(w) {
                        continue;
                    }
                    let changes = match owner[w as usize] {
                        None => vec![(v, Some(w))],
                        Some(u) => vec![(v, Some(w)), (u, mapping[v])],
                    };
                    tick += 1;
                    let d = self.delta(&mut mapping, &changes, &mut stamp, tick);
                    if d > 0 && best.as_ref().is_none_or(|(bd, _)| d > *bd) {
                        best = Some((d, changes));
                    }
                }
            }
            let Some((d, changes)) = best else { break };
            for &(v, _) in &changes {
                if let Some(w) = mapping[v] {
                    owner[w as usize] = None;
                }
            }
            for &(v, val) in &changes {
                mapping[v] = val;
            }
            for &(v, val) in &changes {
                if let Some(w) = val {
                    owner[w as usize] = Some(v);
                }
            }
            score = (score as i64 + d) as usize;
        }
        (mapping, score)
    }

    /// Greedy start plus `config.restarts` random starts; the first best wins.
    pub fn hill_climb(&self, config: &SearchConfig) -> Solution {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let (mut best_map, mut best) = self.climb(self.greedy_start());
        for _ in 0..config.restarts {
            let start = self.random_start(&mut rng);
            let (m, s) = self.climb(start);
            if s > best {
                best = s;
                best_map = m;
            }
        }
        Solution { mapping: best_map, matched: best, exact: false }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn side(facts: &[(u32, &[Arg])], namespaces: &[u8]) -> Side {
        Side {
            facts: facts.iter().map(|(l, a)| Fact { label: *l, args: a.to_vec() }).collect(),
            namespaces: namespaces.to_vec(),
        }
    }

    use Arg::{Const as C, Var as V};

    #[test]
    fn finds_renaming() {
        // pred: R(v0, v1), S(v1, c5); gold: R(v1, v0), S(v0, c5)
        let pred = side(&[(1, &[V(0), V(1)]), (2, &[V(1), C(5)])], &[0, 0]);
        let gold = side(&[(1, &[V(1), V(0)]), (2, &[V(0), C(5)])], &[0, 0]);
        let pb = Problem::new(&pred, &gold);
        let exact = pb.exhaustive();
        assert_eq!(exact.matched, 2);
        assert_eq!(exact.mapping, vec![Some(1), Some(0)]);
        assert_eq!(pb.score(&exact.mapping), 2);
        let hc = pb.hill_climb(&SearchConfig { seed: 3, restarts: 2, exact_threshold: 0 });
        assert_eq!(hc.matched, 2);
    }

    #[test]
    fn respects_namespaces_and_surplus() {
        // three pred vars, one gold var: two must stay unmapped
        let pred = side(&[(1, &[V(0)]), (1, &[V(1)]), (1, &[V(2)])], &[0, 0, 0]);
        let gold = side(&[(1, &[V(0)])], &[0]);
        let sol = Problem::new(&pred, &gold).exhaustive();
        assert_eq!(sol.matched, 1);
        assert_eq!(sol.mapping.iter().filter(|m| m.is_some()).count(), 1);
        // namespace mismatch: nothing can match
        let pred = side(&[(1, &[V(0)])], &[1]);
        let sol = Problem::new(&pred, &gold).exhaustive();
        assert_eq!(sol.matched, 0);
        assert_eq!(sol.mapping, vec![None]);
    }

    #[test]
    fn constant_only_facts() {
        let pred = side(&[(1, &[C(1)]), (1, &[C(2)])], &[]);
        let gold = side(&[(1, &[C(2)])], &[]);
        assert_eq!(Problem::new(&pred, &gold).exhaustive().matched, 1);
        assert_eq!(Problem::new(&pred, &gold).hill_climb(&SearchConfig::default()).matched, 1);
    }
}
