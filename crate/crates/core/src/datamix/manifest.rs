use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{DatamixError, Split};
use crate::drs::{Separator, SymbolSequence};
use crate::format::{linearize_clauses, linearize_sbn, parse_clause_corpus, parse_sbn_corpus, ClauseReader, ParseMode};
use crate::registry::Registry;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Instance {
    pub id: String,
    pub source: String,
    pub target: SymbolSequence,
}

/// Instances per (language, split). A split that was never added is absent,
/// which differs from present but empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusManifest {
    languages: Vec<String>,
    splits: BTreeMap<(String, Split), Vec<Instance>>,
}

impl CorpusManifest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_language(&mut self, language: &str) {
        if !self.languages.iter().any(|l| l == language) {
            self.languages.push(language.to_string());
        }
    }

    /// Appends instances to a split, creating it if needed.
    pub fn add(&mut self, language: &str, split: Split, instances: Vec<Instance>) -> Result<(), DatamixError> {
        self.add_language(language);
        let entry = self.splits.entry((language.to_string(), split)).or_default();
        let mut seen: HashSet<String> = entry.iter().map(|i| i.id.clone()).collect();
        for inst in &instances {
            if !seen.insert(inst.id.clone()) {
                return Err(DatamixError::DuplicateId {
                    language: language.to_string(),
                    split,
                    id: inst.id.clone(),
                });
            }
        }
        entry.extend(instances);
        Ok(())
    }

    pub fn languages(&self) -> &[String] {
        &self.languages
    }

    pub fn has_language(&self, language: &str) -> bool {
        self.languages.iter().any(|l| l == language)
    }

    pub fn split(&self, language: &str, split: Split) -> Option<&[Instance]> {
        self.splits.get(&(language.to_string(), split)).map(Vec::as_slice)
    }

    /// True when the split exists and holds at least one instance.
    pub fn has_data(&self, language: &str, split: Split) -> bool {
        self.split(language, split).is_some_and(|s| !s.is_empty())
    }

    pub fn is_empty(&self) -> bool {
        self.languages.is_empty()
    }

    pub fn stats(&self) -> CorpusStats {
        let counts = self
            .languages
            .iter()
            .map(|l| {
                let row = Split::ALL.iter().map(|&s| self.split(l, s).map(<[Instance]>::len)).collect();
                (l.clone(), row)
            })
            .collect();
        CorpusStats { languages: self.languages.clone(), counts }
    }
}

/// Instance counts per language and split; `None` marks an absent split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub languages: Vec<String>,
    /// Per language, counts in [`Split::ALL`] order.
    pub counts: BTreeMap<String, Vec<Option<usize>>>,
}

impl CorpusStats {
    pub fn count(&self, language: &str, split: Split) -> Option<usize> {
        let i = Split::ALL.iter().position(|&s| s == split)?;
        self.counts.get(language)?[i]
    }

    /// Sum over the present splits of a language.
    pub fn total(&self, language: &str) -> usize {
        self.counts.get(language).map_or(0, |row| row.iter().flatten().sum())
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> DatamixError + '_ {
    move |source| DatamixError::Io { path: path.to_path_buf(), source }
}

type Parsed = Vec<(String, SymbolSequence)>;

/// Reads a data file into (source text, linearized target) per document.
fn read_data(path: &Path, registry: &Registry) -> Result<Parsed, DatamixError> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    let sep = Separator::default();
    let name = path.display().to_string();
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let fail = |line: usize, detail: String| DatamixError::Parse { path: path.to_path_buf(), line, detail };
    match ext {
        "sbn" => parse_sbn_corpus(&text, Some(&name))
            .into_iter()
            .map(|d| match d.content {
                Ok(g) => Ok((d.source_text, linearize_sbn(&g, &sep))),
                Err(e) => Err(fail(d.provenance.first_line, e.detail)),
            })
            .collect(),
        "clf" | "drs" => {
            let reader = ClauseReader::new(registry, ParseMode::Strict);
            parse_clause_corpus(&text, Some(&name), &reader)
                .into_iter()
                .map(|d| match d.content {
                    Ok(s) => Ok((d.source_text, linearize_clauses(&s, &sep))),
                    Err(e) => Err(fail(d.provenance.first_line, e.detail)),
                })
                .collect()
        }
        other => Err(fail(0, format!("unsupported data file extension {other:?}; expected .sbn, .clf or .drs"))),
    }
}

/// Loads `<dir>/<language>/<split>.idx` index files.
///
/// Each index line is `id<TAB>path[#n]`: the `n`th document (1-based,
/// default 1) of a data file, resolved relative to the index. An optional
/// `<dir>/languages.txt` fixes language order; otherwise directories are
/// taken in name order.
pub fn load_manifest(dir: &Path, registry: &Registry) -> Result<CorpusManifest, DatamixError> {
    let mut manifest = CorpusManifest::new();
    let order_file = dir.join("languages.txt");
    let languages: Vec<String> = if order_file.is_file() {
        fs::read_to_string(&order_file)
            .map_err(io(&order_file))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect()
    } else {
        let mut names = Vec::new();
        for entry in fs::read_dir(dir).map_err(io(dir))? {
            let entry = entry.map_err(io(dir))?;
            if entry.path().is_dir() {
                names.push(entry.file_name().to_string_lossy().into_owned());
            }
        }
        names.sort();
        names
    };
    let mut cache: HashMap<PathBuf, Parsed> = HashMap::new();
    for lang in &languages {
        manifest.add_language(lang);
        for split in Split::ALL {
            let idx = dir.join(lang).join(format!("{split}.idx"));
            if !idx.is_file() {
                continue;
            }
            let base = idx.parent().unwrap_or(dir).to_path_buf();
            let text = fs::read_to_string(&idx).map_err(io(&idx))?;
            let mut instances = Vec::new();
            for (no, line) in text.lines().enumerate() {
                let line = line.trim_end();
                if line.trim().is_empty() || line.starts_with('#') {
                    continue;
                }
                let fail = |detail: String| DatamixError::Parse { path: idx.clone(), line: no + 1, detail };
                let (id, target) = line.split_once('\t').ok_or_else(|| fail("expected id<TAB>path".into()))?;
                let (file, ordinal) = match target.rsplit_once('#') {
                    Some((f, n)) => (f, n.parse::<usize>().map_err(|_| fail(format!("bad document number {n:?}")))?),
                    None => (target, 1),
                };
                let path = base.join(file);
                if !cache.contains_key(&path) {
                    let parsed = read_data(&path, registry)?;
                    cache.insert(path.clone(), parsed);
                }
                let docs = &cache[&path];
                let (source, seq) = ordinal
                    .checked_sub(1)
                    .and_then(|i| docs.get(i))
                    .ok_or_else(|| fail(format!("{} has no document {ordinal}", path.display())))?;
                instances.push(Instance { id: id.to_string(), source: source.clone(), target: seq.clone() });
            }
            manifest.add(lang, split, instances)?;
        }
    }
    Ok(manifest)
}
