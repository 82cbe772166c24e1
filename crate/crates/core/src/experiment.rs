//! Scoring a grid of systems against per-language gold data.
//!
//! A grid directory holds `<language>/gold.<ext>` and one prediction file
//! per training regime, `<language>/<regime>.<ext>`, where the extension is
//! `clf` for clause mode and `sbn` for graph mode. A regime without a file
//! for some language shows as absent in the table.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::datamix::Regime;
use crate::drs::{ClauseSet, SequentialGraph};
use crate::format::{parse_clause_corpus, parse_sbn_corpus, ClauseReader, Document, IllFormed, ParseMode};
use crate::metrics::{corpus_score, CorpusConfig, CorpusInput, CorpusScore, MetricsError, Mode};
use crate::registry::Registry;
use crate::report::{render_fine, ResultCell, ResultRow, ResultsTable};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{language}: {source}")]
    Metrics {
        language: String,
        #[source]
        source: MetricsError,
    },
    #[error("{0}: no gold file")]
    MissingGold(PathBuf),
}

/// A parsed corpus file of either representation.
#[derive(Debug, Clone, PartialEq)]
pub enum CorpusDocs {
    Clause(Vec<Document<Result<ClauseSet, IllFormed>>>),
    Graph(Vec<Document<Result<SequentialGraph, IllFormed>>>),
}

impl CorpusDocs {
    pub fn len(&self) -> usize {
        match self {
            CorpusDocs::Clause(d) => d.len(),
            CorpusDocs::Graph(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Pairs a prediction corpus with gold of the same mode.
    pub fn paired<'a>(&'a self, gold: &'a CorpusDocs) -> Option<CorpusInput<'a>> {
        match (self, gold) {
            (CorpusDocs::Clause(pred), CorpusDocs::Clause(gold)) => Some(CorpusInput::Clause { pred, gold }),
            (CorpusDocs::Graph(pred), CorpusDocs::Graph(gold)) => Some(CorpusInput::Graph { pred, gold }),
            _ => None,
        }
    }
}

pub fn extension(mode: Mode) -> &'static str {
    match mode {
        Mode::Clause => "clf",
        Mode::Graph => "sbn",
    }
}

pub fn parse_corpus(text: &str, file: Option<&str>, mode: Mode, parse: ParseMode, registry: &Registry) -> CorpusDocs {
    match mode {
        Mode::Clause => CorpusDocs::Clause(parse_clause_corpus(text, file, &ClauseReader::new(registry, parse))),
        Mode::Graph => CorpusDocs::Graph(parse_sbn_corpus(text, file)),
    }
}

pub fn load_corpus(path: &Path, mode: Mode, parse: ParseMode, registry: &Registry) -> Result<CorpusDocs, ExperimentError> {
    let text = fs::read_to_string(path).map_err(|source| ExperimentError::Io { path: path.to_path_buf(), source })?;
    Ok(parse_corpus(&text, Some(&path.display().to_string()), mode, parse, registry))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeRow {
    pub regime: Regime,
    /// One per language.
    pub scores: Vec<Option<CorpusScore>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentScores {
    pub mode: Mode,
    pub languages: Vec<String>,
    pub rows: Vec<RegimeRow>,
}

fn languages_in(dir: &Path) -> Result<Vec<String>, ExperimentError> {
    let io = |source| ExperimentError::Io { path: dir.to_path_buf(), source };
    let order = dir.join("languages.txt");
    if order.is_file() {
        let text = fs::read_to_string(&order).map_err(io)?;
        return Ok(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_string).collect());
    }
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let entry = entry.map_err(io)?;
        if entry.path().is_dir() {
            out.push(entry.file_name().to_string_lossy().into_owned());
        }
    }
    out.sort();
    Ok(out)
}

pub fn score_experiment(
    dir: &Path,
    mode: Mode,
    config: &CorpusConfig,
    registry: &Registry,
) -> Result<ExperimentScores, ExperimentError> {
    let languages = languages_in(dir)?;
    let ext = extension(mode);
    let mut rows: Vec<RegimeRow> =
        Regime::ALL.iter().map(|&regime| RegimeRow { regime, scores: vec![None; languages.len()] }).collect();
    for (li, lang) in languages.iter().enumerate() {
        let gold_path = dir.join(lang).join(format!("gold.{ext}"));
        if !gold_path.is_file() {
            return Err(ExperimentError::MissingGold(gold_path));
        }
        let gold = load_corpus(&gold_path, mode, ParseMode::Strict, registry)?;
        for row in rows.iter_mut() {
            let path = dir.join(lang).join(format!("{}.{ext}", row.regime));
            if !path.is_file() {
                continue;
            }
            let pred = load_corpus(&path, mode, ParseMode::Strict, registry)?;
            let input = pred.paired(&gold).expect("same mode");
            let score = corpus_score(input, config, registry)
                .map_err(|source| ExperimentError::Metrics { language: lang.clone(), source })?;
            row.scores[li] = Some(score);
        }
    }
    rows.retain(|r| r.scores.iter().any(Option::is_some));
    Ok(ExperimentScores { mode, languages, rows })
}

impl ExperimentScores {
    pub fn results_table(&self, macro_average: bool) -> ResultsTable {
        ResultsTable {
            title: Some(
                match self.mode {
                    Mode::Clause => "clause",
                    Mode::Graph => "graph",
                }
                .to_string(),
            ),
            languages: self.languages.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| ResultRow {
                    label: r.regime.title().to_string(),
                    cells: r.scores.iter().map(|s| s.as_ref().map(|s| ResultCell::of(s, macro_average))).collect(),
                })
                .collect(),
            average: true,
        }
    }

    /// Fine-grained table for one regime across languages (clause mode).
    pub fn fine_table(&self, regime: Regime) -> Option<String> {
        let row = self.rows.iter().find(|r| r.regime == regime)?;
        let columns: Vec<(&str, &crate::metrics::FineGrainedReport)> = self
            .languages
            .iter()
            .zip(&row.scores)
            .filter_map(|(l, s)| Some((l.as_str(), s.as_ref()?.fine_grained.as_ref()?)))
            .collect();
        (!columns.is_empty()).then(|| render_fine(&columns))
    }
}
