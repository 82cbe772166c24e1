//! Plain-text tables for people: corpus statistics, F1/IF result grids,
//! fine-grained breakdowns, length curves and validation summaries.
//!
//! Machine-readable output is the serde form of the library types; these
//! renderers only lay numbers out.

use crate::datamix::{CorpusStats, Split};
use crate::metrics::{CorpusScore, FineCategory, FineGrainedReport, LengthRow, Mode};
use crate::validate::{CorpusValidation, Percent};

const GAP: &str = "  ";
const ABSENT: &str = "/";

#[derive(Clone, Copy)]
enum Align {
    Left,
    Right,
}

fn width(s: &str) -> usize {
    s.chars().count()
}

fn pad(s: &str, w: usize, align: Align) -> String {
    let fill = " ".repeat(w.saturating_sub(width(s)));
    match align {
        Align::Left => format!("{s}{fill}"),
        Align::Right => format!("{fill}{s}"),
    }
}

enum Line {
    Row(Vec<String>),
    Rule,
}

/// Column-aligned text; the first column is left-aligned, the rest right.
struct Grid {
    lines: Vec<Line>,
}

impl Grid {
    fn new() -> Self {
        Grid { lines: Vec::new() }
    }

    fn row<S: Into<String>>(&mut self, cells: impl IntoIterator<Item = S>) {
        self.lines.push(Line::Row(cells.into_iter().map(Into::into).collect()));
    }

    fn rule(&mut self) {
        self.lines.push(Line::Rule);
    }

    fn widths(&self) -> Vec<usize> {
        let mut w: Vec<usize> = Vec::new();
        for line in &self.lines {
            if let Line::Row(cells) = line {
                for (i, c) in cells.iter().enumerate() {
                    if i >= w.len() {
                        w.push(0);
                    }
                    w[i] = w[i].max(width(c));
                }
            }
        }
        w
    }

    fn render_with(&self, widths: &[usize], header: &[String]) -> String {
        let total = widths.iter().sum::<usize>() + GAP.len() * widths.len().saturating_sub(1);
        let mut out = String::new();
        for h in header {
            out.push_str(h.trim_end());
            out.push('\n');
        }
        for line in &self.lines {
            match line {
                Line::Rule => out.push_str(&"-".repeat(total)),
                Line::Row(cells) => {
                    let text: Vec<String> = cells
                        .iter()
                        .enumerate()
                        .map(|(i, c)| pad(c, widths[i], if i == 0 { Align::Left } else { Align::Right }))
                        .collect();
                    out.push_str(text.join(GAP).trim_end());
                }
            }
            out.push('\n');
        }
        out
    }

    fn render(&self) -> String {
        self.render_with(&self.widths(), &[])
    }
}

/// `1234567` as `1,234,567`.
pub fn grouped(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

/// A fraction shown as a two-decimal percentage.
pub fn percent(fraction: f64) -> String {
    Percent::from_fraction(fraction).to_string()
}

/// Instance counts: one row per split plus a total, one column per language.
pub fn render_stats(stats: &CorpusStats, title: Option<&str>) -> String {
    let mut g = Grid::new();
    g.row(std::iter::once(title.unwrap_or("").to_string()).chain(stats.languages.iter().cloned()));
    g.rule();
    for split in Split::ALL {
        let cells = stats.languages.iter().map(|l| stats.count(l, split).map_or(ABSENT.to_string(), grouped));
        g.row(std::iter::once(split.name().to_string()).chain(cells));
    }
    g.rule();
    g.row(std::iter::once("all".to_string()).chain(stats.languages.iter().map(|l| grouped(stats.total(l)))));
    g.render()
}

/// One F1/IF cell of a result grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResultCell {
    /// Fraction in `[0, 1]`.
    pub f1: f64,
    pub if_percent: Percent,
}

impl ResultCell {
    pub fn of(score: &CorpusScore, macro_average: bool) -> Self {
        ResultCell { f1: score.f1(macro_average), if_percent: score.if_percent }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub label: String,
    /// One per language; `None` where the system has no result.
    pub cells: Vec<Option<ResultCell>>,
}

/// F1↑/IF↓ pairs per language, optionally with an average pair that is
/// only filled when every language has a result.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultsTable {
    pub title: Option<String>,
    pub languages: Vec<String>,
    pub rows: Vec<ResultRow>,
    pub average: bool,
}

impl ResultsTable {
    pub fn render(&self) -> String {
        let mut columns = self.languages.clone();
        if self.average {
            columns.push("average".to_string());
        }
        let mut g = Grid::new();
        g.row(std::iter::once(String::new()).chain(columns.iter().flat_map(|_| ["F1↑".to_string(), "IF↓".to_string()])));
        g.rule();
        if let Some(t) = &self.title {
            g.row([t.clone()]);
            g.rule();
        }
        for row in &self.rows {
            let mut cells = vec![row.label.clone()];
            let mut pairs: Vec<Option<(f64, f64)>> =
                row.cells.iter().map(|c| c.map(|c| (c.f1 * 100.0, c.if_percent.0))).collect();
            if self.average {
                let all: Option<Vec<(f64, f64)>> = pairs.iter().copied().collect();
                let n = pairs.len() as f64;
                pairs.push(all.filter(|v| !v.is_empty()).map(|v| {
                    (v.iter().map(|p| p.0).sum::<f64>() / n, v.iter().map(|p| p.1).sum::<f64>() / n)
                }));
            }
            for p in pairs {
                match p {
                    Some((f, i)) => {
                        cells.push(format!("{f:.2}"));
                        cells.push(Percent(i).to_string());
                    }
                    None => cells.extend([ABSENT.to_string(), ABSENT.to_string()]),
                }
            }
            g.row(cells);
        }
        let widths = g.widths();
        // language names centred over their F1/IF pair
        let mut header = pad("", widths[0], Align::Left);
        for (i, name) in columns.iter().enumerate() {
            let span = widths.get(1 + 2 * i).copied().unwrap_or(3) + GAP.len() + widths.get(2 + 2 * i).copied().unwrap_or(3);
            let left = span.saturating_sub(width(name)) / 2;
            header.push_str(GAP);
            header.push_str(&pad(&format!("{}{name}", " ".repeat(left)), span, Align::Left));
        }
        g.render_with(&widths, &[header])
    }
}

/// Fine-grained F1 rows for one or more columns (typically languages).
/// Categories absent from a column show as `/`.
pub fn render_fine(columns: &[(&str, &FineGrainedReport)]) -> String {
    let mut g = Grid::new();
    g.row(std::iter::once(String::new()).chain(columns.iter().map(|(n, _)| n.to_uppercase())));
    g.rule();
    g.row(std::iter::once("All".to_string()).chain(columns.iter().map(|(_, r)| percent(r.overall.f1()))));
    g.rule();
    for c in FineCategory::ALL {
        let label = match c {
            FineCategory::SynsetVerb | FineCategory::SynsetAdjective | FineCategory::SynsetAdverb => {
                format!("    {}", c.title())
            }
            _ => c.title().to_string(),
        };
        let cells = columns.iter().map(|(_, r)| r.get(c).map_or(ABSENT.to_string(), |n| percent(n.f1())));
        g.row(std::iter::once(label).chain(cells));
    }
    g.render()
}

pub fn render_lengths(rows: &[LengthRow]) -> String {
    let mut g = Grid::new();
    g.row(["length", "F1", "count"]);
    g.rule();
    for r in rows {
        g.row([r.length.to_string(), percent(r.mean_f1), r.count.to_string()]);
    }
    g.render()
}

/// Everything a `score` run reports, for one system on one language.
pub fn render_score(score: &CorpusScore, system: &str, language: &str, macro_average: bool) -> String {
    let table = ResultsTable {
        title: Some(match score.mode {
            Mode::Clause => "clause".to_string(),
            Mode::Graph => "graph".to_string(),
        }),
        languages: vec![language.to_string()],
        rows: vec![ResultRow { label: system.to_string(), cells: vec![Some(ResultCell::of(score, macro_average))] }],
        average: false,
    };
    let mut out = table.render();
    out.push_str(&format!(
        "\n{} documents, {} ill-formed; matched {} of {} predicted, {} gold ({} average)\n",
        score.documents,
        score.ill_formed,
        score.micro.matched,
        score.micro.pred_total,
        score.micro.gold_total,
        if macro_average { "macro" } else { "micro" },
    ));
    if let Some(fine) = &score.fine_grained {
        out.push('\n');
        out.push_str(&render_fine(&[(language, fine)]));
    }
    out.push('\n');
    out.push_str(&render_lengths(&score.lengths));
    out
}

/// Findings per ill-formed document, then the IF summary.
pub fn render_validation(v: &CorpusValidation) -> String {
    let mut out = String::new();
    for doc in &v.documents {
        for f in doc.report.errors() {
            out.push_str(&format!("document {}: {} at {}: {}\n", doc.id, f.class, f.location, f.detail));
        }
    }
    out.push_str(&format!(
        "IF↓ {} ({} of {} documents ill-formed)\n",
        v.summary.if_percent, v.summary.ill_formed, v.summary.documents
    ));
    out
}
