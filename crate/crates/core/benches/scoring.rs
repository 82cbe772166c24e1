use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use drskit::format::{Document, IllFormed, Provenance};
use drskit::metrics::{corpus_score, CorpusConfig, CorpusInput, SearchConfig};
use drskit::par::Execution;
use drskit::synth::{self, ClauseGen, GraphGen};
use drskit::Registry;

fn doc<T>(i: usize, content: T) -> Document<Result<T, IllFormed>> {
    Document {
        id: (i + 1).to_string(),
        source_text: "a b c d e f".to_string(),
        provenance: Provenance { file: None, first_line: i + 1, last_line: i + 1 },
        content: Ok(content),
    }
}

fn scoring(c: &mut Criterion) {
    let reg = Registry::bundled();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 256;
    let gen = ClauseGen { max_boxes: 3, max_entities: 8, max_roles: 10 };
    let (mut cp, mut cg) = (Vec::new(), Vec::new());
    for i in 0..n {
        let gold = synth::clause_set(&mut rng, &gen);
        cp.push(doc(i, synth::perturb_clauses(&mut rng, &gold, 4)));
        cg.push(doc(i, gold));
    }
    let mut group = c.benchmark_group("corpus_score");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        let config = CorpusConfig {
            search: SearchConfig { exact_threshold: 0, restarts: 8, ..SearchConfig::default() },
            execution: exec,
            ..CorpusConfig::default()
        };
        group.bench_with_input(BenchmarkId::new("clause", name), &config, |b, cfg| {
            b.iter(|| corpus_score(CorpusInput::Clause { pred: &cp, gold: &cg }, cfg, reg).unwrap())
        });
    }
    group.finish();

    let graphs = GraphGen { max_nodes: 14, max_boxes: 3, max_roles: 14 };
    let mut group = c.benchmark_group("smatch");
    group.sample_size(10);
    let pairs: Vec<_> = (0..n)
        .map(|_| {
            let spec = synth::graph_spec(&mut rng, &graphs);
            (synth::perturb_graph(&mut rng, &spec, 3), spec.build())
        })
        .collect();
    let search = SearchConfig { exact_threshold: 0, restarts: 8, ..SearchConfig::default() };
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_function(BenchmarkId::new("graph", name), |b| {
            b.iter(|| drskit::par::map(exec, &pairs, |(p, g)| drskit::metrics::smatch_f1(p, g, &search).matched()))
        });
    }
    group.finish();
}

criterion_group!(benches, scoring);
criterion_main!(benches);
