use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::counter::image;
use super::{Counts, MetricsError};
use crate::drs::{Clause, ClauseSet, Pos, RelationCategory, SynsetId, TermKind};

/// Rows of the fine-grained breakdown, in display order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FineCategory {
    #[serde(rename = "drs-operator")]
    DrsOperator,
    #[serde(rename = "semantic-role")]
    SemanticRole,
    #[serde(rename = "concept")]
    Concept,
    #[serde(rename = "synset-n")]
    SynsetNoun,
    #[serde(rename = "synset-v")]
    SynsetVerb,
    #[serde(rename = "synset-a")]
    SynsetAdjective,
    #[serde(rename = "synset-r")]
    SynsetAdverb,
}

impl FineCategory {
    pub const ALL: [FineCategory; 7] = [
        FineCategory::DrsOperator,
        FineCategory::SemanticRole,
        FineCategory::Concept,
        FineCategory::SynsetNoun,
        FineCategory::SynsetVerb,
        FineCategory::SynsetAdjective,
        FineCategory::SynsetAdverb,
    ];

    pub fn synset(pos: Pos) -> FineCategory {
        match pos {
            Pos::Noun => FineCategory::SynsetNoun,
            Pos::Verb => FineCategory::SynsetVerb,
            Pos::Adjective => FineCategory::SynsetAdjective,
            Pos::Adverb => FineCategory::SynsetAdverb,
        }
    }

    pub fn is_synset(self) -> bool {
        self >= FineCategory::SynsetNoun
    }

    /// Categories a clause counts towards: its primary category, plus a
    /// synset row for concepts carrying a well-formed sense.
    pub fn of(clause: &Clause) -> Vec<FineCategory> {
        match clause.category() {
            RelationCategory::DrsOperator => vec![FineCategory::DrsOperator],
            RelationCategory::SemanticRole => vec![FineCategory::SemanticRole],
            RelationCategory::Concept => {
                let mut out = vec![FineCategory::Concept];
                if let Some(first) = clause.args().first() {
                    if let Ok(s) = SynsetId::from_concept(clause.relation(), first.label()) {
                        out.push(FineCategory::synset(s.pos()));
                    }
                }
                out
            }
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            FineCategory::DrsOperator => "DRS operator",
            FineCategory::SemanticRole => "Semantic Role",
            FineCategory::Concept => "Concept",
            FineCategory::SynsetNoun => "Synset-Noun",
            FineCategory::SynsetVerb => "-Verb",
            FineCategory::SynsetAdjective => "-Adjective",
            FineCategory::SynsetAdverb => "-Adverb",
        }
    }
}

impl fmt::Display for FineCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.title())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FineGrainedReport {
    pub overall: Counts,
    /// Only categories present on at least one side.
    pub categories: BTreeMap<FineCategory, Counts>,
}

impl FineGrainedReport {
    pub fn get(&self, c: FineCategory) -> Option<&Counts> {
        self.categories.get(&c)
    }

    pub fn merge(&mut self, other: &FineGrainedReport) {
        self.overall += other.overall;
        for (c, n) in &other.categories {
            *self.categories.entry(*c).or_default() += *n;
        }
    }
}

impl std::iter::Sum for FineGrainedReport {
    fn sum<I: Iterator<Item = FineGrainedReport>>(iter: I) -> Self {
        iter.fold(FineGrainedReport::default(), |mut a, b| {
            a.merge(&b);
            a
        })
    }
}

/// Per-category counts under a fixed variable mapping.
pub fn fine_grained(
    pred: &ClauseSet,
    gold: &ClauseSet,
    mapping: &BTreeMap<String, String>,
) -> Result<FineGrainedReport, MetricsError> {
    for (from, to) in mapping {
        let known = |set: &ClauseSet, v: &str| set.variables().contains_key(v);
        if !known(pred, from) {
            return Err(MetricsError::MappingMismatch(from.clone()));
        }
        if !known(gold, to) {
            return Err(MetricsError::MappingMismatch(to.clone()));
        }
        let kind = |v: &str| crate::drs::classify(v) == TermKind::BoxVariable;
        if kind(from) != kind(to) {
            return Err(MetricsError::MappingMismatch(format!("{from} -> {to}")));
        }
    }
    let gold_set: HashSet<&Clause> = gold.clauses().iter().collect();
    let mut report = FineGrainedReport::default();
    for clause in pred.clauses() {
        let hit = image(clause, mapping).is_some_and(|i| gold_set.contains(&i)) as usize;
        report.overall.pred_total += 1;
        report.overall.matched += hit;
        for c in FineCategory::of(clause) {
            let e = report.categories.entry(c).or_default();
            e.pred_total += 1;
            e.matched += hit;
        }
    }
    for clause in gold.clauses() {
        report.overall.gold_total += 1;
        for c in FineCategory::of(clause) {
            report.categories.entry(c).or_default().gold_total += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{parse_clause_file, ParseMode};
    use crate::metrics::{counter_f1, SearchConfig};
    use crate::registry::Registry;

    const GOLD: &str = "b1 REF x1\nb1 person \"n.01\" x1\nb1 REF e1\nb1 run \"v.01\" e1\nb1 Agent e1 x1\nb1 REF s1\nb1 quick \"a.01\" s1\nb1 Attribute e1 s1\n";

    fn report(p: &str, g: &str) -> FineGrainedReport {
        let p = parse_clause_file(p, ParseMode::Lenient).unwrap();
        let g = parse_clause_file(g, ParseMode::Lenient).unwrap();
        let m = counter_f1(&p, &g, &SearchConfig::default(), Registry::bundled()).unwrap();
        let r = fine_grained(&p, &g, &m.mapping).unwrap();
        assert_eq!(r.overall, m.counts);
        r
    }

    #[test]
    fn identical_sets() {
        let r = report(GOLD, GOLD);
        for (c, n) in &r.categories {
            assert_eq!(n.f1(), 1.0, "{c}");
        }
        assert!(r.get(FineCategory::SynsetAdverb).is_none());
        assert_eq!(r.get(FineCategory::Concept).unwrap().gold_total, 3);
        let primary: usize = r.categories.iter().filter(|(c, _)| !c.is_synset()).map(|(_, n)| n.gold_total).sum();
        assert_eq!(primary, r.overall.gold_total);
    }

    #[test]
    fn verb_sense_edit() {
        let r = report(&GOLD.replace("v.01", "v.02"), GOLD);
        assert!(r.get(FineCategory::SynsetVerb).unwrap().f1() < 1.0);
        assert_eq!(r.get(FineCategory::SynsetNoun).unwrap().f1(), 1.0);
    }

    #[test]
    fn mapping_mismatch() {
        let g = parse_clause_file(GOLD, ParseMode::Lenient).unwrap();
        let mut m = BTreeMap::new();
        m.insert("x7".to_string(), "x1".to_string());
        assert_eq!(fine_grained(&g, &g, &m), Err(MetricsError::MappingMismatch("x7".into())));
        m.clear();
        m.insert("x1".to_string(), "b1".to_string());
        assert!(fine_grained(&g, &g, &m).is_err());
    }
}
