//! Dialect identification over geo-referenced corpora.
//!
//! The pipeline runs in stages, each usable on its own:
//!
//! 1. [`ingest`] — turn raw web-page and geo-tagged post dumps into clean,
//!    geo-referenced, deduplicated documents.
//! 2. [`mapping`] — tabulate words per (country, register) and select the
//!    variety inventory by threshold.
//! 3. [`sampling`] — aggregate documents into exactly-1,000-word samples
//!    and assign capped train/dev/test splits.
//! 4. [`cxg`] — parse construction grammars and count construction matches
//!    over annotated token streams.
//! 5. [`features`] — produce fixed-dimension vectors: construction counts,
//!    hashed word n-grams, and function-word counts.
//! 6. [`classify`] — train and evaluate a one-vs-rest linear max-margin
//!    classifier; within-domain, cross-domain, and merged experiments;
//!    confusion-based similarity.
//! 7. [`unmasking`] — iterative retraining while deleting the most
//!    predictive features per class, yielding an F1-vs-round curve.
//!
//! [`synth`] generates synthetic multi-dialect corpora with controlled
//! construction-usage profiles, so every pipeline claim has a desk-scale
//! oracle. [`config`] and [`pipeline`] orchestrate everything from a
//! declarative TOML config; the `dialectid` binary is a thin wrapper over
//! [`pipeline`].
//!
//! See the crate examples for one runnable program per capability.

pub mod classify;
pub mod config;
pub mod cxg;
pub mod features;
pub mod ingest;
pub mod mapping;
pub mod pipeline;
pub mod sampling;
pub mod synth;
pub mod text;
pub mod unmasking;

pub use ingest::{GeoDocument, RawDocument, Register};
pub use sampling::{RegionSample, Split, SplitPlan};
