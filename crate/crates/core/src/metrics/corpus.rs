use serde::{Deserialize, Serialize};

use super::fine::{fine_grained, FineGrainedReport};
use super::length::{length_report, LengthRow};
use super::{counter_f1, smatch_f1, Counts, MatchResult, MetricsError, Pred, SearchConfig};
use crate::convert::{salvage_sbn, sbn_to_graph};
use crate::drs::{ClauseSet, SequentialGraph};
use crate::format::{Document, IllFormed};
use crate::par::{self, derive_seed, Execution};
use crate::registry::Registry;
use crate::validate::{if_rate, validate_clauses, validate_sbn, ErrorClass, Percent, ValidationReport};

pub const SCORE_SCHEMA: &str = "drskit.score/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Clause,
    Graph,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CorpusConfig {
    /// Master search settings; each document gets a seed derived from it.
    pub search: SearchConfig,
    /// Score the valid part of ill-formed predictions instead of nothing.
    /// Such documents still count as ill-formed.
    pub salvage: bool,
    pub execution: Execution,
}

type Docs<'a, T> = &'a [Document<Result<T, IllFormed>>];

/// Aligned prediction and gold documents.
#[derive(Debug, Clone, Copy)]
pub enum CorpusInput<'a> {
    Clause { pred: Docs<'a, ClauseSet>, gold: Docs<'a, ClauseSet> },
    Graph { pred: Docs<'a, SequentialGraph>, gold: Docs<'a, SequentialGraph> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DocumentScore {
    pub id: String,
    pub tokens: usize,
    pub well_formed: bool,
    pub errors: Vec<ErrorClass>,
    #[serde(flatten)]
    pub counts: Counts,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusScore {
    pub schema: &'static str,
    pub mode: Mode,
    pub search: SearchConfig,
    pub documents: usize,
    pub ill_formed: usize,
    /// Summed counts over documents.
    pub micro: Counts,
    /// Mean of per-document F1.
    pub macro_f1: f64,
    pub if_percent: Percent,
    /// Clause mode only.
    pub fine_grained: Option<FineGrainedReport>,
    pub lengths: Vec<LengthRow>,
    pub per_document: Vec<DocumentScore>,
}

impl CorpusScore {
    pub fn f1(&self, macro_average: bool) -> f64 {
        if macro_average {
            self.macro_f1
        } else {
            self.micro.f1()
        }
    }
}

struct Scored {
    report: ValidationReport,
    result: MatchResult,
    fine: Option<FineGrainedReport>,
}

fn check_alignment<A, B>(pred: &[Document<A>], gold: &[Document<B>]) -> Result<(), MetricsError> {
    if pred.len() != gold.len() {
        return Err(MetricsError::AlignmentMismatch(format!(
            "{} predicted documents, {} gold documents",
            pred.len(),
            gold.len()
        )));
    }
    if let Some((p, g)) = pred.iter().zip(gold).find(|(p, g)| p.id != g.id) {
        return Err(MetricsError::AlignmentMismatch(format!("document {} paired with gold {}", p.id, g.id)));
    }
    Ok(())
}

fn gold_error(id: &str, e: impl std::fmt::Display) -> MetricsError {
    MetricsError::GoldNotWellFormed(format!("document {id}: {e}"))
}

fn score_clause_doc(
    index: usize,
    pred: &Document<Result<ClauseSet, IllFormed>>,
    gold: &Document<Result<ClauseSet, IllFormed>>,
    config: &CorpusConfig,
    registry: &Registry,
) -> Result<Scored, MetricsError> {
    let gold_set = gold.content.as_ref().map_err(|e| gold_error(&gold.id, &e.detail))?;
    let search = config.search.with_seed(derive_seed(config.search.seed, index as u64));
    let (report, scored) = match &pred.content {
        Err(e) => (ValidationReport::from_ill_formed(e), None),
        Ok(set) => {
            let report = validate_clauses(set, registry);
            let keep = report.well_formed() || config.salvage;
            (report, keep.then_some(set))
        }
    };
    let result = counter_f1(scored.map_or(Pred::IllFormed, Pred::Parsed), gold_set, &search, registry)
        .map_err(|e| gold_error(&gold.id, e))?;
    let empty = ClauseSet::new(vec![]);
    let fine = fine_grained(scored.unwrap_or(&empty), gold_set, &result.mapping)?;
    Ok(Scored { report, result, fine: Some(fine) })
}

fn score_graph_doc(
    index: usize,
    pred: &Document<Result<SequentialGraph, IllFormed>>,
    gold: &Document<Result<SequentialGraph, IllFormed>>,
    config: &CorpusConfig,
) -> Result<Scored, MetricsError> {
    let gold_seq = gold.content.as_ref().map_err(|e| gold_error(&gold.id, &e.detail))?;
    let gold_graph = sbn_to_graph(gold_seq).map_err(|e| gold_error(&gold.id, e))?;
    let search = config.search.with_seed(derive_seed(config.search.seed, index as u64));
    let (report, graph) = match &pred.content {
        Err(e) => (ValidationReport::from_ill_formed(e), None),
        Ok(seq) => {
            let report = validate_sbn(seq);
            let graph = if report.well_formed() {
                sbn_to_graph(seq).ok()
            } else if config.salvage {
                sbn_to_graph(&salvage_sbn(seq)).ok()
            } else {
                None
            };
            (report, graph)
        }
    };
    let result = smatch_f1(graph.as_ref().map_or(Pred::IllFormed, Pred::Parsed), &gold_graph, &search);
    Ok(Scored { report, result, fine: None })
}

/// Scores aligned documents independently (in parallel when requested) and
/// aggregates in document order, so results do not depend on execution.
pub fn corpus_score(input: CorpusInput<'_>, config: &CorpusConfig, registry: &Registry) -> Result<CorpusScore, MetricsError> {
    type Scoring<'a> = (Mode, Vec<(&'a str, &'a str)>, Vec<Result<Scored, MetricsError>>);
    let (mode, ids, scored): Scoring<'_> = match input {
        CorpusInput::Clause { pred, gold } => {
            check_alignment(pred, gold)?;
            let scored = par::map_range(config.execution, pred.len(), |i| {
                score_clause_doc(i, &pred[i], &gold[i], config, registry)
            });
            (Mode::Clause, gold.iter().map(|d| (d.id.as_str(), d.source_text.as_str())).collect(), scored)
        }
        CorpusInput::Graph { pred, gold } => {
            check_alignment(pred, gold)?;
            let scored = par::map_range(config.execution, pred.len(), |i| score_graph_doc(i, &pred[i], &gold[i], config));
            (Mode::Graph, gold.iter().map(|d| (d.id.as_str(), d.source_text.as_str())).collect(), scored)
        }
    };
    let scored = scored.into_iter().collect::<Result<Vec<_>, _>>()?;
    let reports: Vec<ValidationReport> = scored.iter().map(|s| s.report.clone()).collect();
    let if_percent = if_rate(&reports).map_err(|_| MetricsError::EmptyInput)?;
    let micro: Counts = scored.iter().map(|s| s.result.counts).sum();
    let macro_f1 = scored.iter().map(|s| s.result.f1()).sum::<f64>() / scored.len() as f64;
    let lengths = length_report(ids.iter().zip(&scored).map(|((_, src), s)| (*src, s.result.f1())))?;
    let fine_grained = match mode {
        Mode::Clause => Some(scored.iter().filter_map(|s| s.fine.clone()).sum()),
        Mode::Graph => None,
    };
    let per_document: Vec<DocumentScore> = ids
        .iter()
        .zip(&scored)
        .map(|((id, src), s)| DocumentScore {
            id: id.to_string(),
            tokens: src.split_whitespace().count(),
            well_formed: s.report.well_formed(),
            errors: s.report.classes(),
            counts: s.result.counts,
        })
        .collect();
    Ok(CorpusScore {
        schema: SCORE_SCHEMA,
        mode,
        search: config.search,
        documents: scored.len(),
        ill_formed: per_document.iter().filter(|d| !d.well_formed).count(),
        micro,
        macro_f1,
        if_percent,
        fine_grained,
        lengths,
        per_document,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{parse_clause_corpus, parse_sbn_corpus, ClauseReader, ParseMode};

    const GOLD: &str = "\
%%% A man runs .
b1 REF x1
b1 man \"n.01\" x1
b1 REF e1
b1 run \"v.01\" e1
b1 Agent e1 x1

%%% Two dogs bark loudly today .
b2 REF x1
b2 dog \"n.01\" x1
b2 REF e1
b2 bark \"v.01\" e1
b2 Agent e1 x1
";

    fn clauses(text: &str) -> Vec<Document<Result<ClauseSet, IllFormed>>> {
        parse_clause_corpus(text, None, &ClauseReader::new(Registry::bundled(), ParseMode::Strict))
    }

    fn run(pred: &str, gold: &str, config: CorpusConfig) -> Result<CorpusScore, MetricsError> {
        let (p, g) = (clauses(pred), clauses(gold));
        corpus_score(CorpusInput::Clause { pred: &p, gold: &g }, &config, Registry::bundled())
    }

    #[test]
    fn perfect_corpus() {
        let s = run(GOLD, GOLD, CorpusConfig::default()).unwrap();
        assert_eq!(s.micro.f1(), 1.0);
        assert_eq!(s.if_percent.to_string(), "0.00");
        assert_eq!(s.lengths.len(), 2);
        assert_eq!(s.fine_grained.unwrap().overall, s.micro);
    }

    #[test]
    fn ill_formed_prediction() {
        let pred = GOLD.replace("b2 Agent e1 x1", "b2 Agent e1 x9");
        let s = run(&pred, GOLD, CorpusConfig::default()).unwrap();
        assert_eq!(s.ill_formed, 1);
        assert_eq!(s.if_percent.to_string(), "50.00");
        assert_eq!(s.micro, Counts::new(5, 5, 10));
        assert_eq!(s.per_document[1].errors, vec![ErrorClass::FreeVariable]);
        let salvaged = run(&pred, GOLD, CorpusConfig { salvage: true, ..Default::default() }).unwrap();
        assert_eq!(salvaged.ill_formed, 1);
        assert_eq!(salvaged.micro, Counts::new(9, 10, 10));
    }

    #[test]
    fn alignment() {
        let one = GOLD.split("\n\n").next().unwrap();
        assert!(matches!(run(one, GOLD, CorpusConfig::default()), Err(MetricsError::AlignmentMismatch(_))));
    }

    #[test]
    fn graph_mode_and_execution_agree() {
        let gold = "%%% A man runs .\nman.n.01\nrun.v.01 Agent -1\n\n%%% Rain .\nrain.n.01\n";
        let pred = "%%% A man runs .\nman.n.01\nrun.v.01 Agent +5\n\n%%% Rain .\nrain.n.01\n";
        let (p, g) = (parse_sbn_corpus(pred, None), parse_sbn_corpus(gold, None));
        let input = CorpusInput::Graph { pred: &p, gold: &g };
        let seq = CorpusConfig { execution: Execution::Sequential, ..Default::default() };
        let a = corpus_score(input, &seq, Registry::bundled()).unwrap();
        let b = corpus_score(input, &CorpusConfig::default(), Registry::bundled()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.per_document[0].errors, vec![ErrorClass::OffsetOutOfRange]);
        assert_eq!(a.micro.matched, 3);
        assert!(a.fine_grained.is_none());
    }
}
