//! Scoring predicted DRSs against gold.
//!
//! [`counter_f1`] matches clauses under a variable mapping, [`smatch_f1`]
//! matches graph triples under a node correspondence. Both share one search
//! engine: exhaustive below [`SearchConfig::exact_threshold`] variables,
//! seeded hill climbing above it.

mod corpus;
mod counter;
mod fine;
mod length;
pub(crate) mod matching;
mod smatch;

use std::collections::BTreeMap;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

pub use corpus::{corpus_score, CorpusConfig, CorpusInput, CorpusScore, DocumentScore, Mode, SCORE_SCHEMA};
pub use counter::{counter_f1, counter_facts_matched};
pub use fine::{fine_grained, FineCategory, FineGrainedReport};
pub use length::{length_report, LengthRow};
pub use smatch::{smatch_f1, triple_count};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub seed: u64,
    /// Random restarts on top of the greedy start.
    pub restarts: usize,
    /// Largest variable count (either side) solved exhaustively.
    pub exact_threshold: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { seed: 0, restarts: 4, exact_threshold: 7 }
    }
}

impl SearchConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        SearchConfig { seed, ..self }
    }
}

/// A prediction to be scored: parsed, or unrecoverable.
#[derive(Debug, Clone, Copy)]
pub enum Pred<'a, T> {
    Parsed(&'a T),
    IllFormed,
}

impl<'a, T> From<&'a T> for Pred<'a, T> {
    fn from(t: &'a T) -> Self {
        Pred::Parsed(t)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("gold is not well-formed: {0}")]
    GoldNotWellFormed(String),
    #[error("mapping refers to unknown variable {0}")]
    MappingMismatch(String),
    #[error("cannot compute over empty input")]
    EmptyInput,
    #[error("prediction and gold are misaligned: {0}")]
    AlignmentMismatch(String),
}

/// Matched/predicted/gold counts with the derived scores.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
pub struct Counts {
    pub matched: usize,
    pub pred_total: usize,
    pub gold_total: usize,
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

impl Counts {
    pub fn new(matched: usize, pred_total: usize, gold_total: usize) -> Self {
        debug_assert!(matched <= pred_total.min(gold_total));
        Counts { matched, pred_total, gold_total }
    }

    pub fn precision(&self) -> f64 {
        ratio(self.matched, self.pred_total)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.matched, self.gold_total)
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pred_total == 0 && self.gold_total == 0
    }
}

impl std::ops::Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts::new(self.matched + o.matched, self.pred_total + o.pred_total, self.gold_total + o.gold_total)
    }
}

impl std::ops::AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        *self = *self + o;
    }
}

impl std::iter::Sum for Counts {
    fn sum<I: Iterator<Item = Counts>>(iter: I) -> Counts {
        iter.fold(Counts::default(), |a, b| a + b)
    }
}

impl Serialize for Counts {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Counts", 6)?;
        st.serialize_field("matched", &self.matched)?;
        st.serialize_field("pred_total", &self.pred_total)?;
        st.serialize_field("gold_total", &self.gold_total)?;
        st.serialize_field("precision", &self.precision())?;
        st.serialize_field("recall", &self.recall())?;
        st.serialize_field("f1", &self.f1())?;
        st.end()
    }
}

/// Outcome of scoring one prediction against one gold structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchResult {
    #[serde(flatten)]
    pub counts: Counts,
    /// Prediction variable (or node) to gold variable (or node).
    pub mapping: BTreeMap<String, String>,
    /// Whether the optimum was proven by exhaustive search.
    pub exact: bool,
}

impl MatchResult {
    pub fn ill_formed(gold_total: usize) -> Self {
        MatchResult { counts: Counts::new(0, 0, gold_total), mapping: BTreeMap::new(), exact: true }
    }

    pub fn matched(&self) -> usize {
        self.counts.matched
    }

    pub fn precision(&self) -> f64 {
        self.counts.precision()
    }

    pub fn recall(&self) -> f64 {
        self.counts.recall()
    }

    pub fn f1(&self) -> f64 {
        self.counts.f1()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_conventions() {
        let c = Counts::new(0, 0, 5);
        assert_eq!((c.precision(), c.recall(), c.f1()), (0.0, 0.0, 0.0));
        let c = Counts::new(3, 4, 6);
        assert_eq!(c.precision(), 0.75);
        assert_eq!(c.recall(), 0.5);
        assert!((c.f1() - 0.6).abs() < 1e-12);
        assert_eq!(Counts::new(1, 2, 3) + Counts::new(1, 1, 1), Counts::new(2, 3, 4));
    }

    #[test]
    fn serializes_scores() {
        let v = serde_json::to_value(Counts::new(1, 2, 2)).unwrap();
        assert_eq!(v["precision"], 0.5);
        assert_eq!(v["f1"], 0.5);
    }
}
