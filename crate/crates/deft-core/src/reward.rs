//! The distribution reward: discrepancy weights dotted with the model's
//! averaged per-token log-probabilities.
//!
//! For a response of length `T` the model yields `T` next-token
//! log-probability rows; averaging them over time gives one vector
//! `avg(i) = mean_t log p(i | context_t)`, and the reward of the sample is
//!
//! ```text
//! R_Q = sum_i w(i) * avg(i)
//! ```
//!
//! summed over the support of the discrepancy distribution in ascending
//! token-id order (fixed order keeps the result deterministic).

use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::TokenizedSample;
use crate::distill::DiscrepancyDistribution;
use crate::error::{Error, Result};
use crate::math;

/// Row sums in probability space may deviate from 1 by at most this much.
pub const ROW_NORMALIZATION_TOL: f64 = 1e-9;

/// Row-major `T x V` matrix of next-token log-probabilities, one row per
/// response timestep.
#[derive(Debug, Clone)]
pub struct LogprobMatrix {
    vocab_size: usize,
    data: Vec<f64>,
}

impl LogprobMatrix {
    /// Wrap a row-major buffer; its length must be a multiple of `vocab_size`.
    pub fn from_rows(vocab_size: usize, data: Vec<f64>) -> Result<Self> {
        if vocab_size == 0 || !data.len().is_multiple_of(vocab_size) {
            return Err(Error::BadParameterCount {
                vocab_size,
                expected: vocab_size * (data.len() / vocab_size.max(1)).max(1),
                got: data.len(),
            });
        }
        Ok(LogprobMatrix { vocab_size, data })
    }

    #[must_use]
    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    #[must_use]
    pub fn num_rows(&self) -> usize {
        self.data.len() / self.vocab_size
    }

    #[must_use]
    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.vocab_size..(t + 1) * self.vocab_size]
    }
}

/// Anything that can produce per-timestep log-probability rows for a
/// (prompt, response) pair. Implemented by the toy model; external systems
/// plug in through the same trait or hand the CLI pre-averaged dumps.
pub trait LogprobSource {
    fn vocab_size(&self) -> usize;

    /// One row per response timestep: row `t` is the log-distribution the
    /// model assigns to the token at position `t` given the prompt and the
    /// gold response prefix before `t`.
    fn response_logprobs(&self, prompt: &[u32], response: &[u32]) -> Result<LogprobMatrix>;
}

/// Per-token log-probabilities averaged over response timesteps.
#[derive(Debug, Clone)]
pub struct AvgLogprobVector {
    values: Vec<f64>,
    response_len: usize,
}

impl AvgLogprobVector {
    #[must_use]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[must_use]
    pub fn vocab_size(&self) -> usize {
        self.values.len()
    }

    /// Total number of timesteps averaged over.
    #[must_use]
    pub fn response_len(&self) -> usize {
        self.response_len
    }
}

/// Average the rows of a log-probability matrix over time, first checking
/// that every row is a distribution (sums to 1 in probability space within
/// [`ROW_NORMALIZATION_TOL`]).
pub fn average_logprobs(matrix: &LogprobMatrix) -> Result<AvgLogprobVector> {
    let rows = matrix.num_rows();
    if rows == 0 {
        return Err(Error::EmptyLogprobs);
    }
    for t in 0..rows {
        let sum: f64 = matrix.row(t).iter().map(|&v| math::exp(v)).sum();
        if math::abs(sum - 1.0) > ROW_NORMALIZATION_TOL {
            return Err(Error::RowNotNormalized { row: t, sum });
        }
    }
    let v = matrix.vocab_size();
    let mut values = vec![0.0; v];
    for t in 0..rows {
        for (acc, &x) in values.iter_mut().zip(matrix.row(t)) {
            *acc += x;
        }
    }
    for acc in &mut values {
        *acc /= rows as f64;
    }
    Ok(AvgLogprobVector {
        values,
        response_len: rows,
    })
}

/// Which response(s) of a sample the averaged log-probabilities describe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResponseSelector {
    /// The top-ranked response only (the default).
    #[default]
    Chosen,
    /// Average the per-response vectors over all ranked responses.
    MeanOverAll,
}

/// Averaged log-probabilities for one sample under a selector.
pub fn averaged_logprobs_for_sample<S: LogprobSource + ?Sized>(
    source: &S,
    sample: &TokenizedSample,
    selector: ResponseSelector,
) -> Result<AvgLogprobVector> {
    match selector {
        ResponseSelector::Chosen => {
            let response = &sample.responses[0];
            average_logprobs(&source.response_logprobs(&sample.prompt, &response.ids)?)
        }
        ResponseSelector::MeanOverAll => {
            let mut values = vec![0.0; source.vocab_size()];
            let mut total_len = 0;
            for response in &sample.responses {
                let avg =
                    average_logprobs(&source.response_logprobs(&sample.prompt, &response.ids)?)?;
                for (acc, &x) in values.iter_mut().zip(avg.values()) {
                    *acc += x;
                }
                total_len += avg.response_len();
            }
            let n = sample.responses.len() as f64;
            for acc in &mut values {
                *acc /= n;
            }
            Ok(AvgLogprobVector {
                values,
                response_len: total_len,
            })
        }
    }
}

/// `R_Q` against a dense vector of per-token values (must span the
/// vocabulary). Summation runs over the distribution support in ascending
/// token-id order.
pub fn distribution_reward_values(q_diff: &DiscrepancyDistribution, values: &[f64]) -> Result<f64> {
    if values.len() != q_diff.vocab_size() {
        return Err(Error::VocabSizeMismatch {
            expected: q_diff.vocab_size(),
            got: values.len(),
        });
    }
    // Explicit fold from +0.0 rather than `Iterator::sum`, whose f64
    // identity is -0.0: an empty support must score +0.0 on every path,
    // or dense and sparse scoring disagree in the sign of zero.
    Ok(q_diff
        .support()
        .fold(0.0, |acc, (id, w)| acc + w * values[id as usize]))
}

/// `R_Q` for an averaged log-probability vector.
pub fn distribution_reward(
    q_diff: &DiscrepancyDistribution,
    avg: &AvgLogprobVector,
) -> Result<f64> {
    distribution_reward_values(q_diff, avg.values())
}

/// `R_Q` from sparse `(token id, averaged log-probability)` pairs. Every
/// token in the distribution support must be present; ids must be in range.
pub fn distribution_reward_sparse(
    q_diff: &DiscrepancyDistribution,
    pairs: &[(u32, f64)],
) -> Result<f64> {
    let v = q_diff.vocab_size();
    let mut dense = vec![f64::NAN; v];
    for &(id, value) in pairs {
        if id as usize >= v {
            return Err(Error::TokenOutOfRange { id, vocab_size: v });
        }
        dense[id as usize] = value;
    }
    let mut reward = 0.0;
    for (id, w) in q_diff.support() {
        let value = dense[id as usize];
        if value.is_nan() {
            return Err(Error::SparseMissingToken { id });
        }
        reward += w * value;
    }
    Ok(reward)
}

/// Score every sample in order. The result is index-aligned with `samples`.
pub fn score_dataset<S: LogprobSource + ?Sized>(
    samples: &[TokenizedSample],
    source: &S,
    q_diff: &DiscrepancyDistribution,
    selector: ResponseSelector,
) -> Result<Vec<f64>> {
    if source.vocab_size() != q_diff.vocab_size() {
        return Err(Error::VocabSizeMismatch {
            expected: q_diff.vocab_size(),
            got: source.vocab_size(),
        });
    }
    samples
        .iter()
        .map(|sample| {
            averaged_logprobs_for_sample(source, sample, selector)
                .and_then(|avg| distribution_reward(q_diff, &avg))
                .map_err(|e| e.for_sample(&sample.id))
        })
        .collect()
}
