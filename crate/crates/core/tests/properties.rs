mod common;

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use drskit::convert::{clauses_to_graph, graph_to_sbn, role_edge_count, sbn_to_graph};
use drskit::datamix::{cross_lingual_batches, CorpusManifest, Instance, MixConfig, Selector, Split};
use drskit::drs::{Edge, Node, Pos, RelationCategory, Separator, SymbolSequence, SynsetId, TermKind};
use drskit::format::{
    delinearize_clauses, delinearize_sbn, linearize_clauses, linearize_sbn, parse_clause_corpus, parse_clause_file,
    parse_sbn_corpus, parse_sbn_file, serialize_clause_file, serialize_sbn_file, ClauseReader, ParseMode,
};
use drskit::lora::LoraLayer;
use drskit::metrics::{counter_f1, length_report, smatch_f1, SearchConfig};
use drskit::synth::{self, ClauseGen, GraphGen, SbnGen};
use drskit::validate::{if_rate, validate_sbn};
use drskit::drs::ClauseSet;
use drskit::Registry;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn registry() -> &'static Registry {
    Registry::bundled()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn synset_render_parse(lemma in "[a-z][a-z_]{0,12}", pos in 0usize..4, sense in 1u8..100) {
        let s = SynsetId::new(&lemma, Pos::ALL[pos], sense).unwrap();
        prop_assert_eq!(SynsetId::parse(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn relation_category_is_pure(rel in "\\PC{0,12}") {
        prop_assert_eq!(RelationCategory::of(&rel), RelationCategory::of(&rel));
    }

    #[test]
    fn built_graphs_respect_endpoint_types(seed in any::<u64>()) {
        let g = synth::graph(&mut rng(seed), &GraphGen { max_nodes: 10, max_boxes: 3, max_roles: 9 });
        let node = |id: drskit::drs::NodeId| g.node(id);
        let mut memberships = BTreeMap::new();
        for e in g.edges() {
            match e {
                Edge::SemanticRole { from, to, .. } => prop_assert!(node(*from).is_item() && node(*to).is_item()),
                Edge::DiscourseRelation { from, to, .. } => {
                    prop_assert!(matches!(node(*from), Node::BoxDummy(_)) && matches!(node(*to), Node::BoxDummy(_)))
                }
                Edge::Membership { predicate, box_node } => {
                    prop_assert!(matches!(node(*predicate), Node::Predicate(_)));
                    prop_assert!(matches!(node(*box_node), Node::BoxDummy(_)));
                    *memberships.entry(predicate.0).or_insert(0) += 1;
                }
            }
        }
        for (i, n) in g.nodes().iter().enumerate() {
            if matches!(n, Node::Predicate(_)) {
                prop_assert_eq!(memberships.get(&i), Some(&1));
            }
        }
    }

    #[test]
    fn clause_round_trips(seed in any::<u64>()) {
        let set = synth::clause_set(&mut rng(seed), &ClauseGen { max_boxes: 3, max_entities: 6, max_roles: 6 });
        prop_assert_eq!(&parse_clause_file(&serialize_clause_file(&set), ParseMode::Strict).unwrap(), &set);
        let sep = Separator::default();
        prop_assert_eq!(&delinearize_clauses(&linearize_clauses(&set, &sep), &sep, registry()).unwrap(), &set);
    }

    #[test]
    fn sbn_round_trips(seed in any::<u64>()) {
        let seq = synth::sbn(&mut rng(seed), &SbnGen { max_items: 12, max_satellites: 4 });
        prop_assert_eq!(&parse_sbn_file(&serialize_sbn_file(&seq)).unwrap(), &seq);
        let sep = Separator::default();
        prop_assert_eq!(&delinearize_sbn(&linearize_sbn(&seq, &sep), &sep).unwrap(), &seq);
        let g = sbn_to_graph(&seq).unwrap();
        prop_assert_eq!(&graph_to_sbn(&g, Some(&g.item_nodes())).unwrap(), &seq);
    }

    #[test]
    fn offsets_resolve_to_item_pairs(seed in any::<u64>()) {
        let seq = synth::sbn(&mut rng(seed), &SbnGen { max_items: 12, max_satellites: 4 });
        let g = sbn_to_graph(&seq).unwrap();
        let items = g.item_nodes();
        let edges: BTreeSet<(usize, usize, String)> =
            g.role_edges().map(|(f, t, r)| (f.0, t.0, r.to_string())).collect();
        for (i, item) in seq.items.iter().enumerate() {
            for s in &item.satellites {
                let j = (i as i64 + s.offset()) as usize;
                prop_assert!(edges.contains(&(items[i].0, items[j].0, s.role().to_string())));
            }
        }
        prop_assert_eq!(role_edge_count(&g), seq.satellite_count());
        prop_assert_eq!(graph_to_sbn(&g, None).unwrap().satellite_count(), seq.satellite_count());
    }

    #[test]
    fn converted_graphs_forget_variables(seed in any::<u64>()) {
        let set = synth::clause_set(&mut rng(seed), &ClauseGen { max_boxes: 3, max_entities: 6, max_roles: 6 });
        let g = clauses_to_graph(&set, registry());
        prop_assume!(g.is_ok());
        let g = g.unwrap();
        let vars: BTreeSet<&str> = set.variables().keys().map(String::as_str).collect();
        for n in g.nodes() {
            let label = n.label();
            prop_assert!(label.split(|c: char| !c.is_alphanumeric()).all(|w| !vars.contains(w)), "{}", label);
        }
    }

    #[test]
    fn converter_output_is_well_formed(seed in any::<u64>()) {
        let set = synth::clause_set(&mut rng(seed), &ClauseGen { max_boxes: 3, max_entities: 6, max_roles: 6 });
        let g = clauses_to_graph(&set, registry());
        prop_assume!(g.is_ok());
        let seq = graph_to_sbn(&g.unwrap(), None).unwrap();
        prop_assert!(validate_sbn(&seq).well_formed());
    }

    #[test]
    fn parsing_never_panics(text in "(\\PC{0,30}\n){0,6}") {
        let _ = parse_clause_file(&text, ParseMode::Strict);
        let _ = parse_clause_file(&text, ParseMode::Lenient);
        let _ = parse_sbn_file(&text);
        let _ = parse_clause_corpus(&text, None, &ClauseReader::new(registry(), ParseMode::Strict));
        let _ = parse_sbn_corpus(&text, None);
    }

    #[test]
    fn delinearization_accounts_for_every_token(tokens in prop::collection::vec("[a-z]{1,4}\\.n\\.0[1-3]|Agent|Theme|[+-]?[0-3]|<sep>|\"now\"", 0..24)) {
        let sep = Separator::default();
        let seq = SymbolSequence::new(tokens);
        if let Ok(g) = delinearize_sbn(&seq, &sep) {
            let body = |s: &SymbolSequence| s.tokens.iter().filter(|t| *t != sep.as_str()).count();
            prop_assert_eq!(body(&linearize_sbn(&g, &sep)), body(&seq));
        }
    }

    #[test]
    fn if_rate_ignores_duplication(seed in any::<u64>(), n in 1usize..20) {
        let mut r = rng(seed);
        let reports: Vec<_> = (0..n)
            .map(|_| {
                let seq = synth::sbn(&mut r, &SbnGen::default());
                let seq = if r.gen_bool(0.3) {
                    synth::inject_sbn_fault(&mut r, &seq, drskit::validate::ErrorClass::DuplicateRole).map_or(seq, |i| i.doc)
                } else {
                    seq
                };
                validate_sbn(&seq)
            })
            .collect();
        let doubled: Vec<_> = reports.iter().chain(&reports).cloned().collect();
        prop_assert_eq!(if_rate(&doubled).unwrap(), if_rate(&reports).unwrap());
    }

    #[test]
    fn counter_mapping_is_admissible(seed in any::<u64>(), threshold in prop_oneof![Just(0usize), Just(7)]) {
        let mut r = rng(seed);
        let gold = synth::clause_set(&mut r, &ClauseGen { max_boxes: 3, max_entities: 5, max_roles: 6 });
        let pred = synth::perturb_clauses(&mut r, &gold, 3);
        let res = counter_f1(&pred, &gold, &SearchConfig { seed, restarts: 4, exact_threshold: threshold }, registry()).unwrap();
        let values: BTreeSet<&String> = res.mapping.values().collect();
        prop_assert_eq!(values.len(), res.mapping.len());
        for (p, g) in &res.mapping {
            let kind = |set: &ClauseSet, v: &str| set.variables_of_kind(TermKind::BoxVariable).any(|b| b == v);
            prop_assert_eq!(kind(&pred, p), kind(&gold, g));
        }
        prop_assert_eq!(common::clauses_matched_under(&pred, &gold, &res.mapping), res.matched());
    }

    #[test]
    fn smatch_mapping_is_admissible(seed in any::<u64>()) {
        let mut r = rng(seed);
        let spec = synth::graph_spec(&mut r, &GraphGen { max_nodes: 9, max_boxes: 2, max_roles: 8 });
        let gold = spec.build();
        let pred = synth::perturb_graph(&mut r, &spec, 3);
        let res = smatch_f1(&pred, &gold, &SearchConfig { seed, restarts: 4, exact_threshold: 0 });
        let map = common::node_mapping(&pred, &res.mapping);
        let targets: Vec<usize> = map.iter().flatten().copied().collect();
        prop_assert_eq!(targets.iter().collect::<BTreeSet<_>>().len(), targets.len());
        for (p, g) in map.iter().enumerate() {
            if let Some(g) = g {
                prop_assert_eq!(pred.nodes()[p].is_item(), gold.nodes()[*g].is_item());
            }
        }
        prop_assert_eq!(common::triples_matched_under(&pred, &gold, &map), res.matched());
    }

    #[test]
    fn adding_a_gold_clause_never_hurts(seed in any::<u64>()) {
        let mut r = rng(seed);
        let gold = synth::clause_set(&mut r, &ClauseGen::default());
        let pred = synth::perturb_clauses(&mut r, &gold, 3);
        let missing: Vec<_> = gold.clauses().iter().filter(|c| !pred.clauses().contains(c)).cloned().collect();
        prop_assume!(!missing.is_empty());
        let extended = ClauseSet::new(pred.clauses().iter().cloned().chain([missing[r.gen_range(0..missing.len())].clone()]));
        let cfg = SearchConfig::default();
        let before = counter_f1(&pred, &gold, &cfg, registry()).unwrap().matched();
        let after = counter_f1(&extended, &gold, &cfg, registry()).unwrap().matched();
        prop_assert!(after >= before);
    }

    #[test]
    fn lora_linearity_and_paths(seed in any::<u64>(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let mut r = rng(seed);
        let (d, k) = (r.gen_range(2..20), r.gen_range(2..20));
        let rank = r.gen_range(1..d.min(k));
        let layer = LoraLayer::random(d, k, rank, &mut r).unwrap();
        let x = DVector::from_fn(k, |_, _| r.gen_range(-1.0..1.0));
        let y = DVector::from_fn(k, |_, _| r.gen_range(-1.0..1.0));
        let lhs = layer.forward(&(&x * alpha + &y * beta)).unwrap();
        let rhs = layer.forward(&x).unwrap() * alpha + layer.forward(&y).unwrap() * beta;
        prop_assert!((&lhs - &rhs).amax() <= 1e-9 * (1.0 + rhs.amax()));
        let split = layer.frozen_forward(&x).unwrap() + layer.adapter_forward(&x).unwrap();
        prop_assert!((layer.forward(&x).unwrap() - split).amax() <= 1e-12);
    }

    #[test]
    fn lora_updates_leave_w0_frozen(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (d, k) = (r.gen_range(2..12), r.gen_range(2..12));
        let rank = r.gen_range(1..d.min(k));
        let mut layer = LoraLayer::random(d, k, rank, &mut r).unwrap();
        let w0 = layer.w0().clone();
        prop_assert_eq!(layer.trainable_parameters().len(), rank * (d + k));
        let x = DVector::from_fn(k, |_, _| r.gen_range(-1.0..1.0));
        let g = DVector::from_fn(d, |_, _| r.gen_range(-1.0..1.0));
        let grads = layer.gradients(&x, &g).unwrap();
        layer.update(&grads, 0.1).unwrap();
        prop_assert_eq!(layer.w0(), &w0);
    }

    #[test]
    fn mixer_seeds_change_the_order(a in any::<u64>(), b in any::<u64>()) {
        prop_assume!(a != b);
        let mut m = CorpusManifest::new();
        let docs = (0..100)
            .map(|i| Instance { id: i.to_string(), source: format!("s{i}"), target: SymbolSequence::from_text("entity.n.01") })
            .collect();
        m.add("en", Split::Silver, docs).unwrap();
        let sel = Selector::single("en", Split::Silver).unwrap();
        let order = |seed| {
            let mut s = cross_lingual_batches(&m, &sel, MixConfig { seed, ..MixConfig::default() }).unwrap();
            s.next_epoch().into_iter().flat_map(|b| b.members).collect::<Vec<_>>()
        };
        prop_assert_ne!(order(a), order(b));
        prop_assert_eq!(order(a), order(a));
    }
}

#[test]
fn corrupting_long_inputs_gives_a_falling_length_curve() {
    let mut r = rng(11);
    let gen = ClauseGen { max_boxes: 2, max_entities: 4, max_roles: 4 };
    let mut pairs = Vec::new();
    for len in 3..=12usize {
        for _ in 0..200 {
            let gold = synth::clause_set(&mut r, &gen);
            let pred = synth::perturb_clauses(&mut r, &gold, 2 * (len - 3));
            let f1 = counter_f1(&pred, &gold, &SearchConfig::default(), registry()).unwrap().f1();
            pairs.push((vec!["w"; len].join(" "), f1));
        }
    }
    let rows = length_report(pairs.iter().map(|(s, f)| (s.as_str(), *f))).unwrap();
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[0].mean_f1, 1.0);
    for w in rows.windows(2) {
        assert!(w[1].mean_f1 < w[0].mean_f1, "{rows:?}");
    }
}
