//! Error type shared across the core pipeline.

use alloc::boxed::Box;
use alloc::string::String;

/// Everything that can go wrong in the core pipeline.
///
/// Variants carry enough context (sample ids, row indices, offending values)
/// for the CLI to print a one-line diagnosis without re-deriving anything.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A preference sample needs at least two responses to define a ranking.
    #[error("sample {id}: needs at least 2 responses, got {got}")]
    RankTooShort { id: String, got: usize },

    /// Responses must be scored all-or-none within one sample.
    #[error("sample {id}: responses must be all scored or all unscored")]
    PartiallyScored { id: String },

    /// Raw scores must be non-increasing (best response first).
    #[error("sample {id}: scores are not non-increasing at position {position}")]
    ScoresNotMonotone { id: String, position: usize },

    /// A score was NaN or infinite.
    #[error("sample {id}: non-finite score {value}")]
    NonFiniteScore { id: String, value: f64 },

    /// A response tokenized to nothing.
    #[error("sample {id}: response {index} is empty after tokenization")]
    EmptyResponse { id: String, index: usize },

    /// Two samples share an id.
    #[error("duplicate sample id {id:?}")]
    DuplicateSampleId { id: String },

    /// No tokens survived tokenization (or the min-count cutoff).
    #[error("empty corpus: no tokens left after tokenization (min_count={min_count})")]
    EmptyCorpus { min_count: usize },

    /// A vocabulary was handed a duplicate or reserved token.
    #[error("duplicate or reserved token {token:?} in vocabulary")]
    DuplicateToken { token: String },

    /// Classification thresholds must satisfy 0 <= neg < pos <= 1.
    #[error("invalid thresholds: need 0 <= tau_neg < tau_pos <= 1, got tau_pos={tau_pos}, tau_neg={tau_neg}")]
    InvalidThresholds { tau_pos: f64, tau_neg: f64 },

    /// Distillation found no responses on one side of the ranking.
    #[error("empty {pool} pool: no responses classified {pool}")]
    EmptyPool { pool: &'static str },

    /// A log-probability matrix had zero rows.
    #[error("log-probability matrix has no rows")]
    EmptyLogprobs,

    /// A log-probability row does not describe a distribution.
    #[error("log-probability row {row} sums to {sum:e} in probability space, expected 1")]
    RowNotNormalized { row: usize, sum: f64 },

    /// Two pipeline stages disagree about the vocabulary size.
    #[error("vocabulary size mismatch: expected {expected}, got {got}")]
    VocabSizeMismatch { expected: usize, got: usize },

    /// A token id fell outside the vocabulary.
    #[error("token id {id} out of range for vocabulary of size {vocab_size}")]
    TokenOutOfRange { id: u32, vocab_size: usize },

    /// A sparse log-probability record was missing a token the
    /// discrepancy distribution needs.
    #[error(
        "sparse log-probability record missing token id {id} required by the distribution support"
    )]
    SparseMissingToken { id: u32 },

    /// The filter fraction must lie in (0, 1].
    #[error("fraction must be in (0, 1], got {fraction}")]
    InvalidFraction { fraction: f64 },

    /// The toy model needs at least two tokens to predict anything.
    #[error("vocabulary too small for the toy model: need >= 2 tokens, got {vocab_size}")]
    VocabTooSmall { vocab_size: usize },

    /// A checkpoint payload disagreed with its own header.
    #[error("parameter table has {got} entries, expected {expected} for vocab size {vocab_size}")]
    BadParameterCount {
        vocab_size: usize,
        expected: usize,
        got: usize,
    },

    /// DPO needs a frozen reference policy.
    #[error("method dpo requires a reference snapshot")]
    MissingReference,

    /// Guided training was requested without a discrepancy distribution.
    #[error("distribution guidance (omega={omega}) requires a discrepancy distribution")]
    MissingDiscrepancy { omega: f64 },

    /// A gradient went NaN or infinite; the update is refused.
    #[error("non-finite gradient for context row {row}")]
    NonFiniteGradient { row: usize },

    /// A training loss went NaN or infinite; training aborts.
    #[error("non-finite loss at step {step}")]
    NonFiniteLoss { step: usize },

    /// A training or generation config failed validation.
    #[error("invalid config: {reason}")]
    InvalidConfig { reason: String },

    /// An error attributable to one sample; wraps the underlying cause.
    #[error("sample {id}: {source}")]
    Sample {
        id: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Attach a sample id to an error bubbling out of per-sample work.
    #[must_use]
    pub fn for_sample(self, id: &str) -> Self {
        Error::Sample {
            id: String::from(id),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
