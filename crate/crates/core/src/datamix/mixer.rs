use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CorpusManifest, DatamixError, Selector, Split};

/// One input/output pair, with nothing identifying its language.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrainingInstance {
    pub input: Vec<String>,
    pub output: Vec<String>,
}

/// The selected instances as one undifferentiated pool.
#[derive(Debug, Clone)]
pub struct Pool {
    instances: Vec<TrainingInstance>,
    // kept for auditing, never emitted
    origins: Vec<(usize, Split)>,
    languages: Vec<String>,
}

impl Pool {
    /// Pools the selected splits that exist; missing ones are skipped.
    pub fn from_manifest(manifest: &CorpusManifest, selector: &Selector) -> Result<Pool, DatamixError> {
        let mut pool = Pool { instances: Vec::new(), origins: Vec::new(), languages: Vec::new() };
        for (lang, split) in selector.parts() {
            if !manifest.has_language(lang) {
                return Err(DatamixError::UnknownLanguage(lang.clone()));
            }
            let Some(items) = manifest.split(lang, *split) else { continue };
            let li = match pool.languages.iter().position(|l| l == lang) {
                Some(i) => i,
                None => {
                    pool.languages.push(lang.clone());
                    pool.languages.len() - 1
                }
            };
            for inst in items {
                let input: Vec<String> = inst.source.split_whitespace().map(str::to_string).collect();
                if input.is_empty() || inst.target.is_empty() {
                    return Err(DatamixError::EmptyInstance { id: format!("{lang}/{split}/{}", inst.id) });
                }
                pool.instances.push(TrainingInstance { input, output: inst.target.tokens.clone() });
                pool.origins.push((li, *split));
            }
        }
        if pool.instances.is_empty() {
            return Err(DatamixError::EmptyPool);
        }
        Ok(pool)
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn instance(&self, index: usize) -> &TrainingInstance {
        &self.instances[index]
    }

    /// Where a pooled instance came from. For audits only.
    pub fn origin(&self, index: usize) -> (&str, Split) {
        let (l, s) = self.origins[index];
        (&self.languages[l], s)
    }

    pub fn language_counts(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for &(l, _) in &self.origins {
            *out.entry(self.languages[l].clone()).or_default() += 1;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    /// Each epoch is a fresh permutation of the pool.
    #[default]
    Shuffle,
    /// Each epoch draws pool-size indices uniformly with replacement.
    WithReplacement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixConfig {
    pub batch_size: usize,
    pub seed: u64,
    pub sampling: Sampling,
}

impl Default for MixConfig {
    fn default() -> Self {
        MixConfig { batch_size: 8, seed: 0, sampling: Sampling::Shuffle }
    }
}

/// Pool positions of one batch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Batch {
    pub epoch: usize,
    pub index: usize,
    pub members: Vec<usize>,
}

/// The emitted form of a batch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatchRecord<'a> {
    pub epoch: usize,
    pub batch: usize,
    pub instances: Vec<&'a TrainingInstance>,
}

/// Endless, strictly ordered stream of batches over a pool.
#[derive(Debug, Clone)]
pub struct BatchStream {
    pool: Pool,
    config: MixConfig,
    rng: ChaCha8Rng,
    order: Vec<usize>,
    cursor: usize,
    epoch: usize,
    batch: usize,
}

impl BatchStream {
    pub fn new(pool: Pool, config: MixConfig) -> Result<Self, DatamixError> {
        if config.batch_size == 0 {
            return Err(DatamixError::BadBatchSize);
        }
        if pool.is_empty() {
            return Err(DatamixError::EmptyPool);
        }
        let mut s = BatchStream {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            pool,
            config,
            order: Vec::new(),
            cursor: 0,
            epoch: 0,
            batch: 0,
        };
        s.start_epoch();
        Ok(s)
    }

    fn start_epoch(&mut self) {
        let n = self.pool.len();
        self.order = match self.config.sampling {
            Sampling::Shuffle => {
                let mut o: Vec<usize> = (0..n).collect();
                o.shuffle(&mut self.rng);
                o
            }
            Sampling::WithReplacement => (0..n).map(|_| self.rng.gen_range(0..n)).collect(),
        };
        self.cursor = 0;
        self.batch = 0;
    }

    pub fn pool(&self) -> &Pool {
        &self.pool
    }

    pub fn config(&self) -> &MixConfig {
        &self.config
    }

    /// All batches of the current epoch, advancing to the next one.
    pub fn next_epoch(&mut self) -> Vec<Batch> {
        let epoch = self.epoch;
        let mut out = Vec::new();
        while self.epoch == epoch {
            out.push(self.next().expect("stream is endless"));
        }
        out
    }

    pub fn record<'a>(&'a self, batch: &Batch) -> BatchRecord<'a> {
        BatchRecord {
            epoch: batch.epoch,
            batch: batch.index,
            instances: batch.members.iter().map(|&i| self.pool.instance(i)).collect(),
        }
    }
}

impl Iterator for BatchStream {
    type Item = Batch;

    /// The last batch of an epoch may be short; it is still emitted.
    fn next(&mut self) -> Option<Batch> {
        let end = (self.cursor + self.config.batch_size).min(self.order.len());
        let batch = Batch { epoch: self.epoch, index: self.batch, members: self.order[self.cursor..end].to_vec() };
        self.cursor = end;
        self.batch += 1;
        if self.cursor == self.order.len() {
            self.epoch += 1;
            self.start_epoch();
        }
        Some(batch)
    }
}

/// Pools the selection without language labels and streams seeded batches.
pub fn cross_lingual_batches(
    manifest: &CorpusManifest,
    selector: &Selector,
    config: MixConfig,
) -> Result<BatchStream, DatamixError> {
    BatchStream::new(Pool::from_manifest(manifest, selector)?, config)
}
