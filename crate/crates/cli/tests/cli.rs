use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use drskit::experiment::load_corpus;
use drskit::format::ParseMode;
use drskit::metrics::{corpus_score, CorpusConfig, Mode, SearchConfig};
use drskit::report::render_stats;
use drskit::Registry;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(rel)
}

fn drskit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drskit"))
        .args(args)
        .env_remove("DRSKIT_SEED")
        .env_remove("DRSKIT_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_names_the_offset_fault() {
    let bad = fixture("bad_offset.sbn");
    let out = drskit(&["validate", "--mode", "sbn", path(&bad)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("offset-out-of-range"));
    let strict = drskit(&["--strict", "validate", "--mode", "sbn", path(&bad)]);
    assert_eq!(strict.status.code(), Some(1));
    let machine = drskit(&["--format", "machine", "validate", "--mode", "sbn", path(&bad)]);
    let v: serde_json::Value = serde_json::from_slice(&machine.stdout).unwrap();
    assert_eq!(v["schema"], "drskit.validation/1");
    assert_eq!(v["documents"][0]["errors"][0]["class"], "offset-out-of-range");
}

#[test]
fn usage_and_data_errors_have_distinct_codes() {
    assert_eq!(drskit(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(drskit(&["score", "--mode", "tree", "a", "b"]).status.code(), Some(2));
    assert_eq!(drskit(&["convert", "--from", "sbn", "--to", "clause", "x.sbn"]).status.code(), Some(2));
    assert_eq!(drskit(&["validate", "--mode", "sbn", "/nonexistent/file.sbn"]).status.code(), Some(1));
}

#[test]
fn banner_echoes_effective_settings() {
    let out = drskit(&["--seed", "11", "stats", path(&fixture("manifest"))]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("drskit ") && err.contains("seed=11") && err.contains("restarts=4"), "{err}");
}

#[test]
fn scoring_is_reproducible_and_job_independent() {
    let (pred, gold) = (fixture("results/en/base.clf"), fixture("results/en/gold.clf"));
    let run = |jobs: &str| {
        stdout(&drskit(&["--format", "machine", "--jobs", jobs, "score", "--mode", "clause", path(&pred), path(&gold), "--seed", "7", "--exact-threshold", "0"]))
    };
    let a = run("1");
    assert_eq!(a, run("1"));
    assert_eq!(a, run("3"));
}

#[test]
fn score_output_is_the_library_result() {
    let reg = Registry::bundled();
    let (pred, gold) = (fixture("results/de/cross-lingual.sbn"), fixture("results/de/gold.sbn"));
    let p = load_corpus(&pred, Mode::Graph, ParseMode::Strict, reg).unwrap();
    let g = load_corpus(&gold, Mode::Graph, ParseMode::Strict, reg).unwrap();
    let cfg = CorpusConfig { search: SearchConfig::default().with_seed(3), ..CorpusConfig::default() };
    let expected = corpus_score(p.paired(&g).unwrap(), &cfg, reg).unwrap();
    let out = drskit(&["--format", "machine", "--seed", "3", "score", "--mode", "graph", path(&pred), path(&gold)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), serde_json::to_string_pretty(&expected).unwrap() + "\n");
}

#[test]
fn machine_score_schema_is_pinned() {
    let out = drskit(&[
        "--format",
        "machine",
        "score",
        "--mode",
        "clause",
        path(&fixture("results/en/base.clf")),
        path(&fixture("results/en/gold.clf")),
    ]);
    let text = stdout(&out).replace(env!("CARGO_MANIFEST_DIR"), "$ROOT");
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/score_machine.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&golden, &text).unwrap();
    }
    assert_eq!(text, std::fs::read_to_string(golden).unwrap());
}

#[test]
fn stats_matches_library_rendering() {
    let dir = fixture("manifest");
    let m = drskit::datamix::load_manifest(&dir, Registry::bundled()).unwrap();
    let out = drskit(&["stats", path(&dir)]);
    assert_eq!(stdout(&out), render_stats(&m.stats(), None));
    for row in ["silver", "train", "dev", "test"] {
        assert!(stdout(&out).lines().any(|l| l.starts_with(row)));
    }
}

#[test]
fn grid_prints_every_regime() {
    let out = drskit(&["score", "--mode", "clause", "--grid", path(&fixture("results"))]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for regime in ["Base", "Base+", "Cross-lingual", "Cross-lingual+"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{regime} "))), "{regime}\n{text}");
    }
}

#[test]
fn config_file_sets_defaults_and_flags_win() {
    let dir = std::env::temp_dir().join(format!("drskit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "seed = 5\nformat = \"machine\"\nrestarts = 9\n").unwrap();
    let manifest = fixture("manifest");
    let out = drskit(&["--config", path(&cfg), "stats", path(&manifest)]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("seed=5") && err.contains("restarts=9") && err.contains("format=machine"), "{err}");
    assert!(serde_json::from_slice::<serde_json::Value>(&out.stdout).is_ok());
    let out = drskit(&["--config", path(&cfg), "--seed", "6", "--format", "human", "stats", path(&manifest)]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("seed=6") && err.contains("format=human"), "{err}");
    std::fs::write(&cfg, "colour = \"blue\"\n").unwrap();
    assert_eq!(drskit(&["--config", path(&cfg), "stats", path(&manifest)]).status.code(), Some(1));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn mix_streams_seeded_language_blind_batches() {
    let manifest = fixture("manifest");
    let args = ["mix", path(&manifest), "--regime", "cross-lingual", "--epochs", "1", "--batch-size", "16"];
    let a = drskit(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, drskit(&args).stdout);
    let mut seeded = vec!["--seed", "1"];
    seeded.extend(args);
    assert_ne!(a.stdout, drskit(&seeded).stdout);
    let lines: Vec<serde_json::Value> = stdout(&a).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let total: usize = lines.iter().map(|l| l["instances"].as_array().unwrap().len()).sum();
    assert_eq!(total, 1276 + 66 + 53 + 12 + 27 + 12);
    for l in &lines {
        let keys: Vec<&String> = l.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["batch", "epoch", "instances", "stage"]);
        for inst in l["instances"].as_array().unwrap() {
            let keys: Vec<&String> = inst.as_object().unwrap().keys().collect();
            assert_eq!(keys, ["input", "output"]);
        }
    }
    let missing = drskit(&["mix", path(&manifest), "--regime", "base+", "--language", "nl"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn convert_round_trips_through_linear_text() {
    let dir = std::env::temp_dir().join(format!("drskit-conv-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let lin = dir.join("gold.lin");
    let gold = fixture("results/nl/gold.sbn");
    let out = drskit(&["convert", "--from", "sbn", "--to", "linear", path(&gold), "-o", path(&lin)]);
    assert_eq!(out.status.code(), Some(0));
    let back = drskit(&["convert", "--from", "linear-sbn", "--to", "sbn", path(&lin)]);
    let original: Vec<String> = std::fs::read_to_string(&gold)
        .unwrap()
        .split("\n\n")
        .map(|b| b.lines().filter(|l| !l.starts_with("%%%")).collect::<Vec<_>>().join("\n"))
        .collect();
    let again: Vec<String> = stdout(&back)
        .split("\n\n")
        .map(|b| b.lines().filter(|l| !l.starts_with("%%%")).collect::<Vec<_>>().join("\n"))
        .collect();
    assert_eq!(original, again);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn clause_to_sbn_keeps_surface_order() {
    let out = drskit(&["convert", "--from", "clause", "--to", "sbn", path(&fixture("running_example.clf"))]);
    assert!(stdout(&out).lines().any(|l| l == "climb_up.v.01 Agent -1 Time +1 Theme +2"), "{}", stdout(&out));
}

#[test]
fn lora_demo_reports_counts_and_enforces_tolerance() {
    let out = drskit(&["--format", "machine", "lora-demo"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((v["full"].as_u64(), v["lora"].as_u64()), (Some(1_048_576), Some(65_536)));
    assert_eq!(drskit(&["lora-demo", "--tolerance", "0"]).status.code(), Some(1));
    assert_eq!(drskit(&["lora-demo", "-r", "1024"]).status.code(), Some(1));
}
