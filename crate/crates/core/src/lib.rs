//! Toolkit for discourse representation structures (DRSs).
//!
//! * [`drs`]: clause, graph and sequential-graph data model
//! * [`format`]: clause and SBN files, symbol-sequence linearization
//! * [`validate`]: well-formedness checks and ill-formed rates
//! * [`convert`]: clause set to graph, graph to and from SBN
//! * [`metrics`]: clause-level and graph-level F1 under optimal variable mappings
//! * [`datamix`]: corpus manifests, language-blind batch mixing, stage schedules
//! * [`lora`]: low-rank adapter forward pass, parameter counts, gradient checks
//! * [`report`]: plain-text tables for results and corpus statistics
//!
//! Corpus-level work runs on rayon when the `parallel` feature is on (the
//! default); see [`par`].

pub mod convert;
pub mod datamix;
pub mod drs;
pub mod experiment;
pub mod format;
pub mod lora;
pub mod metrics;
pub mod par;
pub mod registry;
pub mod report;
pub mod synth;
pub mod validate;

pub use registry::Registry;
