//! Core library for distribution-distilled preference filtering and
//! distribution-guided fine-tuning.
//!
//! The pipeline implemented here:
//!
//! 1. distill a *discrepancy distribution* from the positive/negative response
//!    pools of a preference dataset ([`distill`]),
//! 2. score each sample with a *distribution reward*: the inner product of the
//!    discrepancy weights with the model's averaged per-token log-probabilities
//!    ([`reward`]),
//! 3. drop the lowest-reward fraction of each subset ([`filter`]), and
//! 4. fine-tune a small autoregressive model with the reward as a guidance
//!    term on the training objective ([`toylm`], [`train`]).
//!
//! [`synth`] generates synthetic preference corpora with a known ground-truth
//! discrepancy, [`analysis`] measures distribution shift between corpora and
//! runs filter-fraction sweeps, and [`pipeline`] wires the whole thing
//! together end to end.
//!
//! The crate is `no_std` (alloc only); all file formats and IO live in the
//! companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod corpus;
pub mod distill;
pub mod error;
pub mod filter;
mod math;
pub mod pipeline;
pub mod reward;
pub mod synth;
pub mod toylm;
pub mod train;

pub use corpus::{Dataset, PreferenceSample, TokenizedSample, Vocab};
pub use distill::DiscrepancyDistribution;
pub use error::{Error, Result};
pub use reward::ResponseSelector;
pub use synth::SyntheticSpec;
pub use toylm::ToyAutoregressiveModel;
pub use train::{Method, MetricsLog, TrainConfig};
