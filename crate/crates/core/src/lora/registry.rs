use serde::Serialize;

use super::{param_counts, LoraError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdaptedLayer {
    pub name: String,
    pub d: usize,
    pub k: usize,
    pub adapted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelCounts {
    /// Weights of all registered layers.
    pub frozen: usize,
    /// Adapter weights over the adapted layers.
    pub trainable: usize,
    pub ratio: f64,
}

/// Named linear layers and which of them carry an adapter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdapterRegistry {
    pub rank: usize,
    pub layers: Vec<AdaptedLayer>,
}

impl AdapterRegistry {
    /// `blocks` attention blocks of width `d_model`, each with q, k, v and o
    /// projections; adapters go on the projections listed in `targets`.
    pub fn attention(blocks: usize, d_model: usize, rank: usize, targets: &[&str]) -> Self {
        let layers = (0..blocks)
            .flat_map(|b| {
                ["q", "k", "v", "o"].into_iter().map(move |p| AdaptedLayer {
                    name: format!("block{b}.attention.{p}"),
                    d: d_model,
                    k: d_model,
                    adapted: targets.contains(&p),
                })
            })
            .collect();
        AdapterRegistry { rank, layers }
    }

    pub fn counts(&self) -> Result<ModelCounts, LoraError> {
        let mut frozen = 0;
        let mut trainable = 0;
        for l in &self.layers {
            frozen += l.d * l.k;
            if l.adapted {
                trainable += param_counts(l.d, l.k, self.rank)?.lora;
            }
        }
        let ratio = if frozen == 0 { 0.0 } else { trainable as f64 / frozen as f64 };
        Ok(ModelCounts { frozen, trainable, ratio })
    }
}
