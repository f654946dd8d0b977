//! Preference-training losses and the distribution-guided training loop.
//!
//! The guided objective is `total = L_method - omega * R_Q`: the usual
//! alignment loss minus a weighted distribution reward, so gradient descent
//! simultaneously fits the data and pushes averaged log-probabilities toward
//! the positive side of the discrepancy distribution. `R_Q` can also ride
//! along purely as a logged metric (`rq_in_loss = false`), which must leave
//! the optimization bit-for-bit untouched.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::TokenizedSample;
use crate::distill::DiscrepancyDistribution;
use crate::error::{Error, Result};
use crate::math;
use crate::reward::{averaged_logprobs_for_sample, distribution_reward, ResponseSelector};
use crate::toylm::{
    accumulate_avg_logprob_dot_grad, accumulate_sequence_logprob_grad, apply_update, GradTable,
    ParameterSnapshot, ToyAutoregressiveModel,
};

/// Which alignment loss drives training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Length-normalized negative log-likelihood of the chosen response.
    #[default]
    Sft,
    /// Direct preference optimization on the (chosen, last-ranked) pair
    /// against a frozen reference policy.
    Dpo,
    /// Preference ranking optimization over the full ranking, plus a
    /// weighted SFT term on the chosen response.
    Pro,
}

impl Method {
    #[must_use]
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Sft => "sft",
            Method::Dpo => "dpo",
            Method::Pro => "pro",
        }
    }
}

/// Hyperparameters for one training run. Defaults are the toy-scale
/// equivalents of the reference recipe: 2 epochs, DPO beta 0.1, PRO SFT
/// weight 0.05, and a guidance weight scaled for bigram-table gradients.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub method: Method,
    /// Guidance weight on the distribution reward.
    pub omega: f64,
    /// DPO inverse temperature.
    pub beta: f64,
    /// PRO's auxiliary SFT term weight.
    pub sft_weight: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Optional hard cap on optimizer steps (for equal-compute comparisons);
    /// epochs still bound the total.
    pub max_steps: Option<usize>,
    /// Seed for the epoch shuffles.
    pub seed: u64,
    /// When false, R_Q is computed and logged but kept out of the objective.
    pub rq_in_loss: bool,
    /// Ablation: keep `-omega * R_Q` in the reported loss but block its
    /// gradient.
    pub rq_stop_gradient: bool,
    /// Which response(s) feed the averaged log-probabilities for R_Q.
    pub response_selector: ResponseSelector,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            method: Method::Sft,
            omega: 0.1,
            beta: 0.1,
            sft_weight: 0.05,
            learning_rate: 0.1,
            epochs: 2,
            batch_size: 1,
            max_steps: None,
            seed: 0,
            rq_in_loss: true,
            rq_stop_gradient: false,
            response_selector: ResponseSelector::Chosen,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |reason: alloc::string::String| Err(Error::InvalidConfig { reason });
        if !(self.omega.is_finite() && self.omega >= 0.0) {
            return bad(format!("omega must be finite and >= 0, got {}", self.omega));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return bad(format!("beta must be finite and > 0, got {}", self.beta));
        }
        if !(self.sft_weight.is_finite() && self.sft_weight >= 0.0) {
            return bad(format!(
                "sft_weight must be finite and >= 0, got {}",
                self.sft_weight
            ));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return bad(format!(
                "learning rate must be finite and >= 0, got {}",
                self.learning_rate
            ));
        }
        if self.batch_size == 0 {
            return bad("batch_size must be >= 1".into());
        }
        if self.max_steps == Some(0) {
            return bad("max_steps must be >= 1 when set".into());
        }
        Ok(())
    }
}

/// Stable logistic sigmoid.
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + math::exp(-x))
    } else {
        let e = math::exp(x);
        e / (1.0 + e)
    }
}

/// SFT loss: `-sequence_logprob(chosen) / |chosen|`.
pub fn sft_loss(
    model: &ToyAutoregressiveModel,
    sample: &TokenizedSample,
    grad: Option<&mut GradTable>,
) -> Result<f64> {
    let chosen = &sample.responses[0].ids;
    let loss = -model.sequence_logprob(&sample.prompt, chosen)? / chosen.len() as f64;
    if let Some(grad) = grad {
        let coeff = -1.0 / chosen.len() as f64;
        accumulate_sequence_logprob_grad(model, &sample.prompt, chosen, coeff, grad)?;
    }
    Ok(loss)
}

/// DPO loss on the (best, worst) response pair:
/// `softplus(-beta * (margin_policy - margin_reference))` with unnormalized
/// sequence log-probabilities, reference frozen.
pub fn dpo_loss(
    model: &ToyAutoregressiveModel,
    reference: &ParameterSnapshot,
    sample: &TokenizedSample,
    beta: f64,
    grad: Option<&mut GradTable>,
) -> Result<f64> {
    let chosen = &sample.responses[0].ids;
    let rejected = &sample.responses[sample.responses.len() - 1].ids;
    let ref_model = reference.model();
    let margin = beta
        * ((model.sequence_logprob(&sample.prompt, chosen)?
            - ref_model.sequence_logprob(&sample.prompt, chosen)?)
            - (model.sequence_logprob(&sample.prompt, rejected)?
                - ref_model.sequence_logprob(&sample.prompt, rejected)?));
    let loss = math::softplus(-margin);
    if let Some(grad) = grad {
        // d loss / d margin = -sigmoid(-margin); reference terms are constant.
        let dmargin = -sigmoid(-margin);
        accumulate_sequence_logprob_grad(model, &sample.prompt, chosen, dmargin * beta, grad)?;
        accumulate_sequence_logprob_grad(model, &sample.prompt, rejected, -dmargin * beta, grad)?;
    }
    Ok(loss)
}

/// PRO's list-ranking term over per-response scores `s` (best first):
/// `sum_k [ logsumexp(s_k..s_last) - s_k ]` for `k = 0 .. l-2`.
#[must_use]
pub fn pro_ranking_loss(scores: &[f64]) -> f64 {
    let l = scores.len();
    let mut loss = 0.0;
    for k in 0..l.saturating_sub(1) {
        loss += math::logsumexp(&scores[k..]) - scores[k];
    }
    loss
}

/// Gradient of [`pro_ranking_loss`] with respect to each score.
fn pro_ranking_grad(scores: &[f64]) -> Vec<f64> {
    let l = scores.len();
    let mut grad = alloc::vec![0.0; l];
    for k in 0..l.saturating_sub(1) {
        let tail = &scores[k..];
        let lse = math::logsumexp(tail);
        for (j, &s) in tail.iter().enumerate() {
            grad[k + j] += math::exp(s - lse);
        }
        grad[k] -= 1.0;
    }
    grad
}

/// PRO loss: ranking term over length-normalized sequence log-probabilities
/// of all ranked responses, plus `sft_weight` times the SFT loss.
pub fn pro_loss(
    model: &ToyAutoregressiveModel,
    sample: &TokenizedSample,
    sft_weight: f64,
    grad: Option<&mut GradTable>,
) -> Result<f64> {
    let scores: Vec<f64> = sample
        .responses
        .iter()
        .map(|r| Ok(model.sequence_logprob(&sample.prompt, &r.ids)? / r.ids.len() as f64))
        .collect::<Result<_>>()?;
    let ranking = pro_ranking_loss(&scores);
    let chosen = &sample.responses[0].ids;
    let sft = -model.sequence_logprob(&sample.prompt, chosen)? / chosen.len() as f64;
    if let Some(grad) = grad {
        let ds = pro_ranking_grad(&scores);
        for (response, &d) in sample.responses.iter().zip(&ds) {
            if d != 0.0 {
                let coeff = d / response.ids.len() as f64;
                accumulate_sequence_logprob_grad(
                    model,
                    &sample.prompt,
                    &response.ids,
                    coeff,
                    grad,
                )?;
            }
        }
        let sft_coeff = sft_weight * (-1.0 / chosen.len() as f64);
        accumulate_sequence_logprob_grad(model, &sample.prompt, chosen, sft_coeff, grad)?;
    }
    Ok(ranking + sft_weight * sft)
}

/// Parts of one guided-loss evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    /// The method loss `L_m`.
    pub base: f64,
    /// The distribution reward `R_Q` (0 when no distribution is given).
    pub reward: f64,
    /// What the optimizer sees: `base - omega * reward` when the reward is
    /// in the loss, otherwise exactly `base`.
    pub total: f64,
}

/// Evaluate the guided objective on one sample, optionally accumulating
/// gradients. `q_diff` may be omitted only when the reward is out of the
/// loss or `omega` is zero; R_Q is then logged as 0.
pub fn deft_loss(
    model: &ToyAutoregressiveModel,
    reference: Option<&ParameterSnapshot>,
    sample: &TokenizedSample,
    q_diff: Option<&DiscrepancyDistribution>,
    cfg: &TrainConfig,
    mut grad: Option<&mut GradTable>,
) -> Result<LossBreakdown> {
    if q_diff.is_none() && cfg.rq_in_loss && cfg.omega != 0.0 {
        return Err(Error::MissingDiscrepancy { omega: cfg.omega });
    }
    let base = match cfg.method {
        Method::Sft => sft_loss(model, sample, grad.as_deref_mut())?,
        Method::Dpo => {
            let reference = reference.ok_or(Error::MissingReference)?;
            dpo_loss(model, reference, sample, cfg.beta, grad.as_deref_mut())?
        }
        Method::Pro => pro_loss(model, sample, cfg.sft_weight, grad.as_deref_mut())?,
    };
    let mut reward = 0.0;
    if let Some(q) = q_diff {
        let avg = averaged_logprobs_for_sample(model, sample, cfg.response_selector)?;
        reward = distribution_reward(q, &avg)?;
        // Gradient of -omega * R_Q, unless guidance is off, weightless, or
        // stop-gradient ablated. Skipping the zero-weight case keeps
        // omega = 0 runs bit-identical to monitoring-only runs.
        let rq_drives_grad = cfg.rq_in_loss && !cfg.rq_stop_gradient && cfg.omega != 0.0;
        if rq_drives_grad {
            if let Some(grad) = grad {
                match cfg.response_selector {
                    ResponseSelector::Chosen => {
                        accumulate_avg_logprob_dot_grad(
                            model,
                            &sample.prompt,
                            &sample.responses[0].ids,
                            q.weights(),
                            -cfg.omega,
                            grad,
                        )?;
                    }
                    ResponseSelector::MeanOverAll => {
                        let per = -cfg.omega / sample.responses.len() as f64;
                        for response in &sample.responses {
                            accumulate_avg_logprob_dot_grad(
                                model,
                                &sample.prompt,
                                &response.ids,
                                q.weights(),
                                per,
                                grad,
                            )?;
                        }
                    }
                }
            }
        }
    }
    let total = if cfg.rq_in_loss {
        base - cfg.omega * reward
    } else {
        base
    };
    Ok(LossBreakdown {
        base,
        reward,
        total,
    })
}

/// One optimizer step as logged: batch-mean losses *before* the update.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub epoch: usize,
    pub base_loss: f64,
    pub reward: f64,
    pub total_loss: f64,
    pub learning_rate: f64,
}

/// Mean validation loss after one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochValidation {
    pub epoch: usize,
    pub mean_total_loss: f64,
}

/// Everything a training run reports.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsLog {
    pub steps: Vec<StepRecord>,
    pub validation: Vec<EpochValidation>,
}

/// Run guided training in place.
///
/// Each epoch visits every sample once in a seeded shuffled order
/// (ChaCha8 keyed by `cfg.seed`), stepping once per batch with mean-reduced
/// gradients; losses are recorded before each update. When a validation set
/// is given, the model with the best (lowest) epoch-end mean validation loss
/// is restored at the end. With `epochs = 0` the model is untouched and the
/// log is empty.
pub fn run_training(
    model: &mut ToyAutoregressiveModel,
    samples: &[TokenizedSample],
    q_diff: Option<&DiscrepancyDistribution>,
    reference: Option<&ParameterSnapshot>,
    validation: Option<&[TokenizedSample]>,
    cfg: &TrainConfig,
) -> Result<MetricsLog> {
    cfg.validate()?;
    if cfg.method == Method::Dpo && reference.is_none() {
        return Err(Error::MissingReference);
    }
    if q_diff.is_none() && cfg.rq_in_loss && cfg.omega != 0.0 {
        return Err(Error::MissingDiscrepancy { omega: cfg.omega });
    }
    if let Some(q) = q_diff {
        if q.vocab_size() != model.vocab_size() {
            return Err(Error::VocabSizeMismatch {
                expected: model.vocab_size(),
                got: q.vocab_size(),
            });
        }
    }
    if samples.is_empty() && cfg.epochs > 0 {
        return Err(Error::InvalidConfig {
            reason: "no training samples".into(),
        });
    }

    let mut log = MetricsLog::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<(f64, ParameterSnapshot)> = None;
    let mut step = 0usize;
    'epochs: for epoch in 0..cfg.epochs {
        let mut order: Vec<usize> = (0..samples.len()).collect();
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            if cfg.max_steps.is_some_and(|cap| step >= cap) {
                break 'epochs;
            }
            let mut grad = GradTable::zeros(model.vocab_size());
            let mut base_sum = 0.0;
            let mut reward_sum = 0.0;
            let mut total_sum = 0.0;
            for &i in batch {
                let sample = &samples[i];
                let parts = deft_loss(model, reference, sample, q_diff, cfg, Some(&mut grad))
                    .map_err(|e| e.for_sample(&sample.id))?;
                base_sum += parts.base;
                reward_sum += parts.reward;
                total_sum += parts.total;
            }
            let n = batch.len() as f64;
            grad.scale(1.0 / n);
            let total = total_sum / n;
            if !total.is_finite() {
                return Err(Error::NonFiniteLoss { step });
            }
            log.steps.push(StepRecord {
                step,
                epoch,
                base_loss: base_sum / n,
                reward: reward_sum / n,
                total_loss: total,
                learning_rate: cfg.learning_rate,
            });
            apply_update(model, &grad, cfg.learning_rate)?;
            step += 1;
        }
        if let Some(validation) = validation {
            let mut sum = 0.0;
            for sample in validation {
                sum += deft_loss(model, reference, sample, q_diff, cfg, None)
                    .map_err(|e| e.for_sample(&sample.id))?
                    .total;
            }
            let mean = sum / validation.len().max(1) as f64;
            log.validation.push(EpochValidation {
                epoch,
                mean_total_loss: mean,
            });
            let better = best.as_ref().is_none_or(|(b, _)| mean < *b);
            if better {
                best = Some((mean, model.snapshot()));
            }
        }
    }
    if let Some((_, snap)) = best {
        model.restore(&snap)?;
    }
    Ok(log)
}
