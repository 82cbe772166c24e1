use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::CommandFactory;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use drskit::convert::{clauses_to_graph, default_order, graph_to_sbn, sbn_to_graph};
use drskit::datamix::{load_manifest, regime_schedule, BatchRecord, BatchStream, MixConfig, Pool, ScheduleConfig};
use drskit::drs::{ClauseSet, Joiner, Separator, SequentialGraph};
use drskit::experiment::{load_corpus, score_experiment};
use drskit::format::{
    delinearize_clauses, delinearize_sbn, linearize_clauses, linearize_sbn, parse_clause_corpus, parse_sbn_corpus,
    parse_sequence_corpus, serialize_clause_file, serialize_corpus, serialize_sbn_file, ClauseReader, ParseMode,
};
use drskit::lora::{grad_check, param_counts, AdapterRegistry, LoraLayer, DEFAULT_STEP};
use drskit::metrics::{corpus_score, CorpusConfig, SearchConfig};
use drskit::par::{derive_seed, Execution};
use drskit::report::{render_stats, render_validation, render_score};
use drskit::validate::{validate_clauses, validate_corpus, validate_sbn, ValidationReport};
use drskit::datamix::Regime;
use drskit::Registry;

use crate::config::{Cli, Command, DocFormat, Effective, FileConfig, InFormat, ItemOrder, LoraArgs, MixArgs, OutFormat, ReportFormat, ScoreArgs};

struct Ctx {
    eff: Effective,
    registry: &'static Registry,
}

impl Ctx {
    fn execution(&self) -> Execution {
        match self.eff.jobs {
            Some(1) => Execution::Sequential,
            _ => Execution::Parallel,
        }
    }

    fn parse_mode(&self) -> ParseMode {
        if self.eff.lenient {
            ParseMode::Lenient
        } else {
            ParseMode::Strict
        }
    }

    fn machine(&self) -> bool {
        self.eff.format == ReportFormat::Machine
    }
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    let file = match &cli.global.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let mut eff = Effective::resolve(&cli.global, file);
    if let Command::Score(args) = &cli.command {
        eff.restarts = args.restarts.unwrap_or(eff.restarts);
        eff.exact_threshold = args.exact_threshold.unwrap_or(eff.exact_threshold);
    }
    if let Command::Mix(args) = &cli.command {
        eff.batch_size = args.batch_size.unwrap_or(eff.batch_size);
    }
    if eff.jobs == Some(0) {
        usage_error("--jobs must be at least 1");
    }
    configure_threads(eff.jobs)?;
    eprintln!(
        "drskit {} {}: seed={} jobs={} restarts={} exact-threshold={} batch-size={} format={} strict={} lenient={}",
        env!("CARGO_PKG_VERSION"),
        command_name(&cli.command),
        eff.seed,
        eff.jobs.map_or_else(|| "auto".to_string(), |j| j.to_string()),
        eff.restarts,
        eff.exact_threshold,
        eff.batch_size,
        if eff.format == ReportFormat::Machine { "machine" } else { "human" },
        eff.strict,
        eff.lenient,
    );
    let ctx = Ctx { eff, registry: Registry::bundled() };
    match cli.command {
        Command::Validate { mode, input } => validate(&ctx, mode, &input),
        Command::Convert { from, to, separator, order, input, output } => {
            convert(&ctx, Conversion { from, to, order }, &separator, &input, output.as_deref())
        }
        Command::Score(args) => score(&ctx, &args),
        Command::Mix(args) => mix(&ctx, &args),
        Command::Stats { manifest } => stats(&ctx, &manifest),
        Command::LoraDemo(args) => lora_demo(&ctx, &args),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Convert { .. } => "convert",
        Command::Score(_) => "score",
        Command::Mix(_) => "mix",
        Command::Stats { .. } => "stats",
        Command::LoraDemo(_) => "lora-demo",
    }
}

fn usage_error(msg: &str) -> ! {
    Cli::command().error(clap::error::ErrorKind::ArgumentConflict, msg).exit()
}

#[cfg(feature = "parallel")]
fn configure_threads(jobs: Option<usize>) -> Result<()> {
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting worker threads")?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_jobs: Option<usize>) -> Result<()> {
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn validate(ctx: &Ctx, mode: DocFormat, input: &Path) -> Result<ExitCode> {
    let text = read(input)?;
    let file = input.display().to_string();
    let exec = ctx.execution();
    let report = match mode {
        DocFormat::Clause => {
            let docs: Vec<_> = parse_clause_corpus(&text, Some(&file), &ClauseReader::new(ctx.registry, ctx.parse_mode()))
                .into_iter()
                .map(|d| (d.id, d.content))
                .collect();
            validate_corpus(&docs, exec, |d| match d {
                Ok(set) => validate_clauses(set, ctx.registry),
                Err(e) => ValidationReport::from_ill_formed(e),
            })
        }
        DocFormat::Sbn => {
            let docs: Vec<_> = parse_sbn_corpus(&text, Some(&file)).into_iter().map(|d| (d.id, d.content)).collect();
            validate_corpus(&docs, exec, |d| match d {
                Ok(seq) => validate_sbn(seq),
                Err(e) => ValidationReport::from_ill_formed(e),
            })
        }
    }
    .with_context(|| format!("validating {file}"))?;
    if ctx.machine() {
        print_json(&report)?;
    } else {
        print!("{}", render_validation(&report));
    }
    Ok(strict_exit(ctx, report.summary.ill_formed))
}

fn strict_exit(ctx: &Ctx, ill_formed: usize) -> ExitCode {
    if ctx.eff.strict && ill_formed > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

enum Parsed {
    Clauses(ClauseSet),
    Sbn(SequentialGraph),
}

struct Loaded {
    id: String,
    source: String,
    content: Result<Parsed, String>,
}

fn load_for_conversion(ctx: &Ctx, from: InFormat, text: &str, file: &str, sep: &Separator) -> Vec<Loaded> {
    let reader = ClauseReader::new(ctx.registry, ctx.parse_mode());
    match from {
        InFormat::Clause => parse_clause_corpus(text, Some(file), &reader)
            .into_iter()
            .map(|d| Loaded { id: d.id, source: d.source_text, content: d.content.map(Parsed::Clauses).map_err(|e| e.to_string()) })
            .collect(),
        InFormat::Sbn => parse_sbn_corpus(text, Some(file))
            .into_iter()
            .map(|d| Loaded { id: d.id, source: d.source_text, content: d.content.map(Parsed::Sbn).map_err(|e| e.to_string()) })
            .collect(),
        InFormat::LinearClause => parse_sequence_corpus(text, Some(file))
            .into_iter()
            .map(|d| Loaded {
                id: d.id,
                source: d.source_text,
                content: delinearize_clauses(&d.content, sep, ctx.registry).map(Parsed::Clauses).map_err(|e| e.to_string()),
            })
            .collect(),
        InFormat::LinearSbn => parse_sequence_corpus(text, Some(file))
            .into_iter()
            .map(|d| Loaded {
                id: d.id,
                source: d.source_text,
                content: delinearize_sbn(&d.content, sep).map(Parsed::Sbn).map_err(|e| e.to_string()),
            })
            .collect(),
    }
}

enum Converted {
    Text(String),
    Json(serde_json::Value),
}

#[derive(Clone, Copy)]
struct Conversion {
    from: InFormat,
    to: OutFormat,
    order: ItemOrder,
}

fn convert_one(ctx: &Ctx, doc: Parsed, conv: Conversion, sep: &Separator) -> Result<Converted, String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    Ok(match (doc, conv.to) {
        (Parsed::Clauses(set), OutFormat::Clause) => Converted::Text(serialize_clause_file(&set)),
        (Parsed::Clauses(set), OutFormat::Sbn) => {
            let g = clauses_to_graph(&set, ctx.registry).map_err(|e| err(&e))?;
            let order = match conv.order {
                ItemOrder::Appearance => g.item_nodes(),
                ItemOrder::Topological => default_order(&g),
            };
            Converted::Text(serialize_sbn_file(&graph_to_sbn(&g, Some(&order)).map_err(|e| err(&e))?))
        }
        (Parsed::Clauses(set), OutFormat::Graph) => {
            Converted::Json(serde_json::to_value(clauses_to_graph(&set, ctx.registry).map_err(|e| err(&e))?).map_err(|e| err(&e))?)
        }
        (Parsed::Clauses(set), OutFormat::Linear) => Converted::Text(linearize_clauses(&set, sep).to_text(Joiner::Space)),
        (Parsed::Sbn(seq), OutFormat::Sbn) => Converted::Text(serialize_sbn_file(&seq)),
        (Parsed::Sbn(seq), OutFormat::Graph) => {
            Converted::Json(serde_json::to_value(sbn_to_graph(&seq).map_err(|e| err(&e))?).map_err(|e| err(&e))?)
        }
        (Parsed::Sbn(seq), OutFormat::Linear) => Converted::Text(linearize_sbn(&seq, sep).to_text(Joiner::Space)),
        (Parsed::Sbn(_), OutFormat::Clause) => unreachable!("rejected before conversion"),
    })
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn convert(ctx: &Ctx, conv: Conversion, separator: &str, input: &Path, output: Option<&Path>) -> Result<ExitCode> {
    let Conversion { from, to, .. } = conv;
    if matches!(from, InFormat::Sbn | InFormat::LinearSbn) && to == OutFormat::Clause {
        usage_error("SBN input cannot be converted to clauses");
    }
    let sep = Separator::new(separator).map_err(|e| anyhow::anyhow!("--separator: {e}"))?;
    let text = read(input)?;
    let docs = load_for_conversion(ctx, from, &text, &input.display().to_string(), &sep);
    let mut failures = 0;
    let mut results = Vec::with_capacity(docs.len());
    for doc in docs {
        let converted = doc.content.and_then(|parsed| convert_one(ctx, parsed, conv, &sep));
        if let Err(e) = &converted {
            failures += 1;
            eprintln!("document {}: {e}", doc.id);
        }
        results.push((doc.id, doc.source, converted));
    }
    if ctx.eff.strict && failures > 0 {
        bail!("{failures} document(s) could not be converted");
    }
    let mut out = open_output(output)?;
    match to {
        OutFormat::Clause | OutFormat::Sbn => {
            let blocks: Vec<(String, String)> = results
                .into_iter()
                .map(|(_, source, c)| match c {
                    Ok(Converted::Text(body)) => (source, body),
                    Ok(Converted::Json(_)) => unreachable!("text formats only"),
                    Err(e) => (source, format!("% conversion failed: {e}\n")),
                })
                .collect();
            out.write_all(serialize_corpus(blocks.iter().map(|(s, b)| (s.as_str(), b.clone()))).as_bytes())?;
        }
        OutFormat::Linear => {
            for (_, _, c) in results {
                match c {
                    Ok(Converted::Text(line)) => writeln!(out, "{line}")?,
                    _ => writeln!(out)?,
                }
            }
        }
        OutFormat::Graph => {
            for (id, _, c) in results {
                let record = match c {
                    Ok(Converted::Json(g)) => serde_json::json!({ "id": id, "graph": g }),
                    Err(e) => serde_json::json!({ "id": id, "error": e }),
                    Ok(Converted::Text(_)) => unreachable!("graph output is JSON"),
                };
                writeln!(out, "{record}")?;
            }
        }
    }
    out.flush()?;
    Ok(if failures > 0 { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn score(ctx: &Ctx, args: &ScoreArgs) -> Result<ExitCode> {
    let config = CorpusConfig {
        search: SearchConfig { seed: ctx.eff.seed, restarts: ctx.eff.restarts, exact_threshold: ctx.eff.exact_threshold },
        salvage: args.salvage,
        execution: ctx.execution(),
    };
    let mode = args.mode.into();
    if let Some(dir) = &args.grid {
        let scores = score_experiment(dir, mode, &config, ctx.registry)?;
        if ctx.machine() {
            print_json(&scores)?;
        } else {
            print!("{}", scores.results_table(args.macro_average).render());
            for regime in Regime::ALL {
                if let Some(fine) = scores.fine_table(regime) {
                    println!("\n{}", regime.title());
                    print!("{fine}");
                }
            }
        }
        let ill: usize = scores.rows.iter().flat_map(|r| r.scores.iter().flatten()).map(|s| s.ill_formed).sum();
        return Ok(strict_exit(ctx, ill));
    }
    let (pred_path, gold_path): (&PathBuf, &PathBuf) = match (&args.pred, &args.gold) {
        (Some(p), Some(g)) => (p, g),
        _ => usage_error("score needs PRED and GOLD, or --grid DIR"),
    };
    let pred = load_corpus(pred_path, mode, ctx.parse_mode(), ctx.registry)?;
    let gold = load_corpus(gold_path, mode, ctx.parse_mode(), ctx.registry)?;
    let input = pred.paired(&gold).context("prediction and gold corpora have different modes")?;
    let result = corpus_score(input, &config, ctx.registry)?;
    if ctx.machine() {
        print_json(&result)?;
    } else {
        print!("{}", render_score(&result, &args.system, &args.language, args.macro_average));
    }
    Ok(strict_exit(ctx, result.ill_formed))
}

#[derive(Serialize)]
struct StageBatch<'a> {
    stage: &'a str,
    #[serde(flatten)]
    record: BatchRecord<'a>,
}

fn mix(ctx: &Ctx, args: &MixArgs) -> Result<ExitCode> {
    let manifest = load_manifest(&args.manifest, ctx.registry)?;
    let schedule_config =
        ScheduleConfig { batch_size: ctx.eff.batch_size, pool_policy: args.pool_policy.into(), ..ScheduleConfig::default() };
    let schedule = regime_schedule(args.regime, &manifest, args.language.as_deref(), &schedule_config)?;
    if args.schedule {
        if ctx.machine() {
            print_json(&schedule)?;
        } else {
            for (i, s) in schedule.stages.iter().enumerate() {
                println!(
                    "stage {} {}: {} for {} epochs, batch size {}, from {} to {}{}",
                    i + 1,
                    s.name,
                    s.selector,
                    s.epochs,
                    s.batch_size,
                    s.init,
                    s.output,
                    if s.note.is_empty() { String::new() } else { format!(" ({})", s.note) }
                );
            }
        }
        return Ok(ExitCode::SUCCESS);
    }
    let mut out = open_output(args.output.as_deref())?;
    for (i, stage) in schedule.stages.iter().enumerate() {
        let pool = Pool::from_manifest(&manifest, &stage.selector)?;
        let config = MixConfig { batch_size: stage.batch_size, seed: derive_seed(ctx.eff.seed, i as u64), sampling: args.sampling.into() };
        let mut stream = BatchStream::new(pool, config)?;
        let epochs = args.epochs.unwrap_or(stage.epochs);
        eprintln!("stage {} {}: {} instances, {} epochs", i + 1, stage.name, stream.pool().len(), epochs);
        for _ in 0..epochs {
            for batch in stream.next_epoch() {
                serde_json::to_writer(&mut out, &StageBatch { stage: &stage.name, record: stream.record(&batch) })?;
                out.write_all(b"\n")?;
            }
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn stats(ctx: &Ctx, dir: &Path) -> Result<ExitCode> {
    let manifest = load_manifest(dir, ctx.registry)?;
    let stats = manifest.stats();
    if ctx.machine() {
        print_json(&stats)?;
    } else {
        print!("{}", render_stats(&stats, None));
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct LoraReport {
    d: usize,
    k: usize,
    r: usize,
    full: usize,
    lora: usize,
    ratio: f64,
    model_frozen: usize,
    model_trainable: usize,
    model_ratio: f64,
    grad_cases: usize,
    grad_max_relative_error: f64,
    tolerance: f64,
    passed: bool,
}

fn lora_demo(ctx: &Ctx, args: &LoraArgs) -> Result<ExitCode> {
    if args.max_dim < 2 || args.max_rank < 1 {
        usage_error("--max-dim must be at least 2 and --max-rank at least 1");
    }
    let counts = param_counts(args.d, args.k, args.r)?;
    let targets: Vec<&str> = args.targets.iter().map(String::as_str).collect();
    let model = AdapterRegistry::attention(args.blocks, args.d, args.r, &targets).counts()?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.eff.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..args.cases {
        let d = rng.gen_range(2..=args.max_dim);
        let k = rng.gen_range(2..=args.max_dim);
        let r = rng.gen_range(1..=args.max_rank.min(d.min(k) - 1));
        let layer = LoraLayer::random(d, k, r, &mut rng)?;
        let x = nalgebra::DVector::from_fn(k, |_, _| rng.gen_range(-1.0..1.0));
        let g = nalgebra::DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
        worst = worst.max(grad_check(&layer, &x, &g, DEFAULT_STEP)?.max_relative_error);
    }
    let passed = worst < args.tolerance;
    let report = LoraReport {
        d: args.d,
        k: args.k,
        r: args.r,
        full: counts.full,
        lora: counts.lora,
        ratio: counts.ratio,
        model_frozen: model.frozen,
        model_trainable: model.trainable,
        model_ratio: model.ratio,
        grad_cases: args.cases,
        grad_max_relative_error: worst,
        tolerance: args.tolerance,
        passed,
    };
    if ctx.machine() {
        print_json(&report)?;
    } else {
        println!("layer {}x{} rank {}: full {} parameters, adapter {} ({:.4}%)", args.d, args.k, args.r, counts.full, counts.lora, counts.ratio * 100.0);
        println!(
            "{} blocks, adapters on {}: frozen {}, trainable {} ({:.4}%)",
            args.blocks,
            targets.join(","),
            model.frozen,
            model.trainable,
            model.ratio * 100.0
        );
        println!(
            "gradient check over {} layers: max relative error {:.3e} (tolerance {:.0e}): {}",
            args.cases,
            worst,
            args.tolerance,
            if passed { "PASS" } else { "FAIL" }
        );
    }
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
