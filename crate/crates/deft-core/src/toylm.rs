//! A deliberately tiny autoregressive model: one learned logit row per
//! context token (a bigram table), softmax over the vocabulary.
//!
//! The context for the first response position is the last prompt token
//! (`<bos>` when the prompt is empty); afterwards it is the previous
//! response token. Small enough that exact gradients are a few lines and
//! finite differences can check every parameter, yet it exercises the whole
//! guided-training loop.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Vocab;
use crate::error::{Error, Result};
use crate::math;
use crate::reward::{LogprobMatrix, LogprobSource};

/// How to fill the logit table at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelInit {
    /// All logits zero: every row is the uniform distribution.
    Zero,
    /// I.i.d. Gaussian logits, mean 0, the given standard deviation.
    Gaussian { sigma: f64 },
}

/// The bigram model: a `V x V` table of logits, row indexed by context
/// token, column by next token.
#[derive(Debug, Clone)]
pub struct ToyAutoregressiveModel {
    vocab_size: usize,
    seed: u64,
    logits: Vec<f64>,
}

/// One sample from N(0, sigma^2) via the Box-Muller transform: two uniform
/// draws u1 in (0,1], u2 in [0,1) give `sigma * sqrt(-2 ln u1) * cos(2 pi u2)`
/// (the second Box-Muller output is discarded, keeping replay trivial).
fn gaussian(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    sigma * math::sqrt(-2.0 * math::ln(u1)) * math::cos(2.0 * core::f64::consts::PI * u2)
}

impl ToyAutoregressiveModel {
    /// Build a model. The seed feeds a ChaCha8 generator for `Gaussian`
    /// init (it is recorded either way, so checkpoints can say where the
    /// parameters came from).
    pub fn new(vocab_size: usize, init: ModelInit, seed: u64) -> Result<Self> {
        if vocab_size < 2 {
            return Err(Error::VocabTooSmall { vocab_size });
        }
        let n = vocab_size * vocab_size;
        let logits = match init {
            ModelInit::Zero => vec![0.0; n],
            ModelInit::Gaussian { sigma } => {
                if !(sigma.is_finite() && sigma >= 0.0) {
                    return Err(Error::InvalidConfig {
                        reason: alloc::format!("gaussian init sigma must be >= 0, got {sigma}"),
                    });
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n).map(|_| gaussian(&mut rng, sigma)).collect()
            }
        };
        Ok(ToyAutoregressiveModel {
            vocab_size,
            seed,
            logits,
        })
    }

    /// Reassemble a model from checkpointed parts. Values are taken as-is
    /// (round-tripping a checkpoint must be bit-exact).
    pub fn from_parts(vocab_size: usize, seed: u64, logits: Vec<f64>) -> Result<Self> {
        if vocab_size < 2 {
            return Err(Error::VocabTooSmall { vocab_size });
        }
        if logits.len() != vocab_size * vocab_size {
            return Err(Error::BadParameterCount {
                vocab_size,
                expected: vocab_size * vocab_size,
                got: logits.len(),
            });
        }
        Ok(ToyAutoregressiveModel {
            vocab_size,
            seed,
            logits,
        })
    }

    #[must_use]
    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    #[must_use]
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The raw parameter table, row-major by context token.
    #[must_use]
    pub fn logits(&self) -> &[f64] {
        &self.logits
    }

    fn check_ids(&self, ids: &[u32]) -> Result<()> {
        for &id in ids {
            if id as usize >= self.vocab_size {
                return Err(Error::TokenOutOfRange {
                    id,
                    vocab_size: self.vocab_size,
                });
            }
        }
        Ok(())
    }

    fn row(&self, context: u32) -> &[f64] {
        let v = self.vocab_size;
        &self.logits[context as usize * v..(context as usize + 1) * v]
    }

    /// Context token for response position `t`.
    #[must_use]
    pub fn context_for(prompt: &[u32], response: &[u32], t: usize) -> u32 {
        if t == 0 {
            prompt.last().copied().unwrap_or(Vocab::BOS_ID)
        } else {
            response[t - 1]
        }
    }

    /// Log-softmax of one context row.
    pub fn log_probs(&self, context: u32) -> Result<Vec<f64>> {
        self.check_ids(&[context])?;
        let row = self.row(context);
        let lse = math::logsumexp(row);
        Ok(row.iter().map(|&z| z - lse).collect())
    }

    /// Sum over response positions of the log-probability of the gold token.
    pub fn sequence_logprob(&self, prompt: &[u32], response: &[u32]) -> Result<f64> {
        if response.is_empty() {
            return Err(Error::EmptyLogprobs);
        }
        self.check_ids(prompt)?;
        self.check_ids(response)?;
        let mut total = 0.0;
        for (t, &y) in response.iter().enumerate() {
            let context = Self::context_for(prompt, response, t);
            let row = self.row(context);
            total += row[y as usize] - math::logsumexp(row);
        }
        Ok(total)
    }

    /// Argmax continuation of `length` tokens; ties resolve to the smallest
    /// token id, so decoding is deterministic.
    pub fn greedy_decode(&self, prompt: &[u32], length: usize) -> Result<Vec<u32>> {
        self.check_ids(prompt)?;
        let mut out = Vec::with_capacity(length);
        let mut context = prompt.last().copied().unwrap_or(Vocab::BOS_ID);
        for _ in 0..length {
            let row = self.row(context);
            let mut best = 0u32;
            let mut best_score = row[0];
            for (k, &z) in row.iter().enumerate().skip(1) {
                if z > best_score {
                    best_score = z;
                    best = k as u32;
                }
            }
            out.push(best);
            context = best;
        }
        Ok(out)
    }

    /// Immutable copy of the current parameters, e.g. for a frozen DPO
    /// reference or best-validation bookkeeping.
    #[must_use]
    pub fn snapshot(&self) -> ParameterSnapshot {
        ParameterSnapshot {
            model: self.clone(),
        }
    }

    /// Overwrite this model's parameters from a snapshot.
    pub fn restore(&mut self, snapshot: &ParameterSnapshot) -> Result<()> {
        if snapshot.model.vocab_size != self.vocab_size {
            return Err(Error::VocabSizeMismatch {
                expected: self.vocab_size,
                got: snapshot.model.vocab_size,
            });
        }
        self.logits.copy_from_slice(&snapshot.model.logits);
        Ok(())
    }
}

impl LogprobSource for ToyAutoregressiveModel {
    fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    fn response_logprobs(&self, prompt: &[u32], response: &[u32]) -> Result<LogprobMatrix> {
        if response.is_empty() {
            return Err(Error::EmptyLogprobs);
        }
        self.check_ids(prompt)?;
        self.check_ids(response)?;
        let mut data = Vec::with_capacity(response.len() * self.vocab_size);
        for t in 0..response.len() {
            let context = Self::context_for(prompt, response, t);
            data.extend(self.log_probs(context)?);
        }
        LogprobMatrix::from_rows(self.vocab_size, data)
    }
}

/// Frozen model parameters. The inner model is only reachable by shared
/// reference, so the snapshot cannot drift.
#[derive(Debug, Clone)]
pub struct ParameterSnapshot {
    model: ToyAutoregressiveModel,
}

impl ParameterSnapshot {
    #[must_use]
    pub fn model(&self) -> &ToyAutoregressiveModel {
        &self.model
    }
}

impl LogprobSource for ParameterSnapshot {
    fn vocab_size(&self) -> usize {
        self.model.vocab_size()
    }

    fn response_logprobs(&self, prompt: &[u32], response: &[u32]) -> Result<LogprobMatrix> {
        self.model.response_logprobs(prompt, response)
    }
}

/// Accumulated gradients, same shape as the logit table.
#[derive(Debug, Clone)]
pub struct GradTable {
    vocab_size: usize,
    data: Vec<f64>,
}

impl GradTable {
    #[must_use]
    pub fn zeros(vocab_size: usize) -> Self {
        GradTable {
            vocab_size,
            data: vec![0.0; vocab_size * vocab_size],
        }
    }

    #[must_use]
    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    #[must_use]
    pub fn values(&self) -> &[f64] {
        &self.data
    }

    #[must_use]
    pub fn get(&self, context: u32, token: u32) -> f64 {
        self.data[context as usize * self.vocab_size + token as usize]
    }

    /// Multiply every entry, e.g. by `1/batch_len` for a mean reduction.
    pub fn scale(&mut self, factor: f64) {
        for g in &mut self.data {
            *g *= factor;
        }
    }

    fn row_mut(&mut self, context: u32) -> &mut [f64] {
        let v = self.vocab_size;
        &mut self.data[context as usize * v..(context as usize + 1) * v]
    }
}

/// Accumulate `coeff * d(sequence_logprob)/d(logits)` into `grad`.
///
/// For each position with context row `c` and gold token `y`, the row
/// gradient is `coeff * (onehot(y) - softmax(row_c))`.
pub fn accumulate_sequence_logprob_grad(
    model: &ToyAutoregressiveModel,
    prompt: &[u32],
    response: &[u32],
    coeff: f64,
    grad: &mut GradTable,
) -> Result<()> {
    if response.is_empty() {
        return Err(Error::EmptyLogprobs);
    }
    if grad.vocab_size() != model.vocab_size() {
        return Err(Error::VocabSizeMismatch {
            expected: model.vocab_size(),
            got: grad.vocab_size(),
        });
    }
    model.check_ids(prompt)?;
    model.check_ids(response)?;
    for (t, &y) in response.iter().enumerate() {
        let context = ToyAutoregressiveModel::context_for(prompt, response, t);
        let logp = model.log_probs(context)?;
        let row = grad.row_mut(context);
        for (k, (g, &lp)) in row.iter_mut().zip(&logp).enumerate() {
            let p = math::exp(lp);
            let indicator = if k as u32 == y { 1.0 } else { 0.0 };
            *g += coeff * (indicator - p);
        }
    }
    Ok(())
}

/// Accumulate `coeff * d(sum_i w_i * avg_i)/d(logits)` into `grad`, where
/// `avg` is the time-averaged log-probability vector for this response.
///
/// Per visited context row: `coeff/T * (w - softmax(row) * sum(w))`. The
/// weight sum is carried exactly as computed (for a distilled distribution
/// it is ~0 but not exactly 0, and the finite-difference checks notice).
pub fn accumulate_avg_logprob_dot_grad(
    model: &ToyAutoregressiveModel,
    prompt: &[u32],
    response: &[u32],
    weights: &[f64],
    coeff: f64,
    grad: &mut GradTable,
) -> Result<()> {
    if response.is_empty() {
        return Err(Error::EmptyLogprobs);
    }
    if weights.len() != model.vocab_size() {
        return Err(Error::VocabSizeMismatch {
            expected: model.vocab_size(),
            got: weights.len(),
        });
    }
    if grad.vocab_size() != model.vocab_size() {
        return Err(Error::VocabSizeMismatch {
            expected: model.vocab_size(),
            got: grad.vocab_size(),
        });
    }
    model.check_ids(prompt)?;
    model.check_ids(response)?;
    let weight_sum: f64 = weights.iter().sum();
    let per_step = coeff / response.len() as f64;
    for t in 0..response.len() {
        let context = ToyAutoregressiveModel::context_for(prompt, response, t);
        let logp = model.log_probs(context)?;
        let row = grad.row_mut(context);
        for ((g, &w), &lp) in row.iter_mut().zip(weights).zip(&logp) {
            *g += per_step * (w - math::exp(lp) * weight_sum);
        }
    }
    Ok(())
}

/// One plain SGD step: `logits -= lr * grad`. Refuses non-finite gradients
/// so a diverged loss cannot quietly poison the table.
pub fn apply_update(model: &mut ToyAutoregressiveModel, grad: &GradTable, lr: f64) -> Result<()> {
    if grad.vocab_size() != model.vocab_size {
        return Err(Error::VocabSizeMismatch {
            expected: model.vocab_size,
            got: grad.vocab_size(),
        });
    }
    for (i, &g) in grad.values().iter().enumerate() {
        if !g.is_finite() {
            return Err(Error::NonFiniteGradient {
                row: i / model.vocab_size,
            });
        }
        model.logits[i] -= lr * g;
    }
    Ok(())
}

/// Parameter-update strategies. Plain SGD is the only one shipped; the
/// training loop only sees this trait.
pub trait Optimizer {
    fn step(&mut self, model: &mut ToyAutoregressiveModel, grad: &GradTable) -> Result<()>;
}

/// Stateless stochastic gradient descent at a fixed learning rate.
#[derive(Debug, Clone, Copy)]
pub struct Sgd {
    pub learning_rate: f64,
}

impl Optimizer for Sgd {
    fn step(&mut self, model: &mut ToyAutoregressiveModel, grad: &GradTable) -> Result<()> {
        apply_update(model, grad, self.learning_rate)
    }
}
