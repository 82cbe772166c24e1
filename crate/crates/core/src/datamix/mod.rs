//! Training data plumbing: per-language split manifests, language-blind
//! batch mixing, and the stage schedules of the four training regimes.
//!
//! Nothing here trains a model. Schedules and batch streams are emitted for
//! an external trainer, and dev/test data can never enter them.

mod manifest;
mod mixer;
mod schedule;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use manifest::{load_manifest, CorpusManifest, CorpusStats, Instance};
pub use mixer::{cross_lingual_batches, Batch, BatchRecord, BatchStream, MixConfig, Pool, Sampling, TrainingInstance};
pub use schedule::{finetune_stage, regime_schedule, PoolPolicy, Regime, ScheduleConfig, Stage, StageSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Silver,
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 4] = [Split::Silver, Split::Train, Split::Dev, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Silver => "silver",
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }

    /// Only silver and gold train data may be trained on.
    pub fn trainable(self) -> bool {
        matches!(self, Split::Silver | Split::Train)
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Split {
    type Err = DatamixError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Split::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| DatamixError::UnknownSplit(s.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum DatamixError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {detail}")]
    Parse { path: PathBuf, line: usize, detail: String },
    #[error("duplicate instance id {id} in {language}/{split}")]
    DuplicateId { language: String, split: Split, id: String },
    #[error("instance {id} has an empty input or output")]
    EmptyInstance { id: String },
    #[error("the selected pool is empty")]
    EmptyPool,
    #[error("batch size must be at least 1")]
    BadBatchSize,
    #[error("unknown language {0}")]
    UnknownLanguage(String),
    #[error("unknown split {0}")]
    UnknownSplit(String),
    #[error("unknown regime {0}")]
    UnknownRegime(String),
    #[error("{0} data may not be used for training")]
    ForbiddenSplit(Split),
    #[error("{language} has no {split} data")]
    MissingSplit { language: String, split: Split },
    #[error("regime {0} needs a language")]
    LanguageRequired(Regime),
}

/// Which (language, split) parts feed a stage. Only trainable splits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Selector {
    parts: Vec<(String, Split)>,
}

impl Selector {
    pub fn new(parts: impl IntoIterator<Item = (String, Split)>) -> Result<Self, DatamixError> {
        let mut out: Vec<(String, Split)> = Vec::new();
        for (lang, split) in parts {
            if !split.trainable() {
                return Err(DatamixError::ForbiddenSplit(split));
            }
            if !out.iter().any(|(l, s)| *l == lang && *s == split) {
                out.push((lang, split));
            }
        }
        if out.is_empty() {
            return Err(DatamixError::EmptyPool);
        }
        Ok(Selector { parts: out })
    }

    pub fn single(language: &str, split: Split) -> Result<Self, DatamixError> {
        Self::new([(language.to_string(), split)])
    }

    pub fn parts(&self) -> &[(String, Split)] {
        &self.parts
    }

    pub fn languages(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for (l, _) in &self.parts {
            if !out.contains(&l.as_str()) {
                out.push(l);
            }
        }
        out
    }
}

impl fmt::Display for Selector {
    /// `en:train+silver de:silver`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for lang in self.languages() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let splits: Vec<&str> = self.parts.iter().filter(|(l, _)| l == lang).map(|(_, s)| s.name()).collect();
            write!(f, "{lang}:{}", splits.join("+"))?;
        }
        Ok(())
    }
}
