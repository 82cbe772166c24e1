use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CorpusManifest, DatamixError, Selector, Split};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "base")]
    Base,
    #[serde(rename = "base+")]
    BasePlus,
    #[serde(rename = "cross-lingual")]
    CrossLingual,
    #[serde(rename = "cross-lingual+")]
    CrossLingualPlus,
}

impl Regime {
    pub const ALL: [Regime; 4] = [Regime::Base, Regime::BasePlus, Regime::CrossLingual, Regime::CrossLingualPlus];

    pub fn name(self) -> &'static str {
        match self {
            Regime::Base => "base",
            Regime::BasePlus => "base+",
            Regime::CrossLingual => "cross-lingual",
            Regime::CrossLingualPlus => "cross-lingual+",
        }
    }

    /// Row label used in result tables.
    pub fn title(self) -> &'static str {
        match self {
            Regime::Base => "Base",
            Regime::BasePlus => "Base+",
            Regime::CrossLingual => "Cross-lingual",
            Regime::CrossLingualPlus => "Cross-lingual+",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = DatamixError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Regime::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| DatamixError::UnknownRegime(s.to_string()))
    }
}

/// What the mixed stage pools from each language.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoolPolicy {
    /// Gold train and silver for every language.
    #[default]
    TrainAndSilver,
    /// Gold train where present, silver only for languages without it.
    SilverWhereNoTrain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleConfig {
    pub mixed_epochs: usize,
    pub finetune_epochs: usize,
    pub batch_size: usize,
    pub pool_policy: PoolPolicy,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig { mixed_epochs: 20, finetune_epochs: 100, batch_size: 8, pool_policy: PoolPolicy::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub name: String,
    pub selector: Selector,
    pub epochs: usize,
    pub batch_size: usize,
    /// Batches are drawn from all selected languages without labels.
    pub language_blind: bool,
    /// Checkpoint the stage starts from.
    pub init: String,
    /// Checkpoint tag the stage produces.
    pub output: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageSchedule {
    pub regime: Option<Regime>,
    pub language: Option<String>,
    pub stages: Vec<Stage>,
}

const PRETRAINED: &str = "pretrained";

fn require_language<'a>(manifest: &CorpusManifest, language: &'a str) -> Result<&'a str, DatamixError> {
    if manifest.has_language(language) {
        Ok(language)
    } else {
        Err(DatamixError::UnknownLanguage(language.to_string()))
    }
}

/// Gold train if the language has any, silver otherwise.
fn monolingual_selector(manifest: &CorpusManifest, language: &str) -> Result<(Selector, &'static str), DatamixError> {
    if manifest.has_data(language, Split::Train) {
        Ok((Selector::single(language, Split::Train)?, "gold train data"))
    } else if manifest.has_data(language, Split::Silver) {
        Ok((Selector::single(language, Split::Silver)?, "no gold train data; silver instead"))
    } else {
        Err(DatamixError::MissingSplit { language: language.to_string(), split: Split::Train })
    }
}

fn single_stage(
    manifest: &CorpusManifest,
    language: &str,
    name: &str,
    init: &str,
    config: &ScheduleConfig,
) -> Result<Stage, DatamixError> {
    let (selector, note) = monolingual_selector(manifest, language)?;
    Ok(Stage {
        name: name.to_string(),
        selector,
        epochs: config.finetune_epochs,
        batch_size: config.batch_size,
        language_blind: false,
        init: init.to_string(),
        output: format!("{name}-{language}"),
        note: note.to_string(),
    })
}

/// Language-specific fine-tuning from an existing checkpoint.
pub fn finetune_stage(
    manifest: &CorpusManifest,
    language: &str,
    base_checkpoint: &str,
    config: &ScheduleConfig,
) -> Result<StageSchedule, DatamixError> {
    let language = require_language(manifest, language)?;
    let stage = single_stage(manifest, language, "fine-tune", base_checkpoint, config)?;
    Ok(StageSchedule { regime: None, language: Some(language.to_string()), stages: vec![stage] })
}

fn mixed_stage(manifest: &CorpusManifest, config: &ScheduleConfig) -> Result<Stage, DatamixError> {
    let mut parts = Vec::new();
    for lang in manifest.languages() {
        let train = manifest.has_data(lang, Split::Train);
        if train {
            parts.push((lang.clone(), Split::Train));
        }
        let silver = match config.pool_policy {
            PoolPolicy::TrainAndSilver => true,
            PoolPolicy::SilverWhereNoTrain => !train,
        };
        if silver && manifest.has_data(lang, Split::Silver) {
            parts.push((lang.clone(), Split::Silver));
        }
    }
    Ok(Stage {
        name: "cross-lingual".to_string(),
        selector: Selector::new(parts)?,
        epochs: config.mixed_epochs,
        batch_size: config.batch_size,
        language_blind: true,
        init: PRETRAINED.to_string(),
        output: "cross-lingual".to_string(),
        note: "one pool over all languages, no language identification; keep the last-epoch checkpoint".to_string(),
    })
}

/// Stage plan for one of the four regimes.
pub fn regime_schedule(
    regime: Regime,
    manifest: &CorpusManifest,
    language: Option<&str>,
    config: &ScheduleConfig,
) -> Result<StageSchedule, DatamixError> {
    let language = match (regime, language) {
        (_, Some(l)) => Some(require_language(manifest, l)?),
        (Regime::CrossLingual, None) => None,
        (_, None) => return Err(DatamixError::LanguageRequired(regime)),
    };
    let stages = match regime {
        Regime::Base => {
            let lang = language.expect("checked above");
            vec![single_stage(manifest, lang, "base", PRETRAINED, config)?]
        }
        Regime::BasePlus => {
            let lang = language.expect("checked above");
            if !manifest.has_data(lang, Split::Train) {
                return Err(DatamixError::MissingSplit { language: lang.to_string(), split: Split::Train });
            }
            let mut parts = vec![(lang.to_string(), Split::Train)];
            if manifest.has_data(lang, Split::Silver) {
                parts.push((lang.to_string(), Split::Silver));
            }
            let first = Stage {
                name: "base+ step 1".to_string(),
                selector: Selector::new(parts)?,
                epochs: config.finetune_epochs,
                batch_size: config.batch_size,
                language_blind: false,
                init: PRETRAINED.to_string(),
                output: format!("base+1-{lang}"),
                note: "gold train and silver data".to_string(),
            };
            let mut second = single_stage(manifest, lang, "base+ step 2", &first.output, config)?;
            second.output = format!("base+-{lang}");
            vec![first, second]
        }
        Regime::CrossLingual => vec![mixed_stage(manifest, config)?],
        Regime::CrossLingualPlus => {
            let lang = language.expect("checked above");
            let mixed = mixed_stage(manifest, config)?;
            let tune = finetune_stage(manifest, lang, &mixed.output, config)?;
            std::iter::once(mixed).chain(tune.stages).collect()
        }
    };
    Ok(StageSchedule { regime: Some(regime), language: language.map(str::to_string), stages })
}
