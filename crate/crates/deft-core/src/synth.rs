//! Synthetic preference data from two mixture "agents" with a known
//! ground-truth discrepancy.
//!
//! Both agents share a pool of common tokens; with probability
//! `mixing_rate` the positive agent emits from its private positive pool
//! and the negative agent from its private negative pool. The true
//! discrepancy is therefore `+rho/|P|` on positive-pool tokens,
//! `-rho/|N|` on negative-pool tokens, and exactly 0 on shared tokens.
//!
//! Every sample is generated from its own ChaCha8 stream keyed by
//! `(seed, sample index)`, so any sample can be regenerated in isolation
//! and datasets are reproducible regardless of iteration order. Held-out
//! evaluation prompts use streams starting at `sample_count`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Dataset, PreferenceSample, ResponseText, Vocab};
use crate::error::{Error, Result};
use crate::toylm::ToyAutoregressiveModel;

/// Shape of a synthetic preference corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    /// Tokens common to both agents (`s0`, `s1`, ...).
    pub shared_tokens: usize,
    /// The positive agent's private pool (`p0`, `p1`, ...).
    pub positive_tokens: usize,
    /// The negative agent's private pool (`n0`, `n1`, ...).
    pub negative_tokens: usize,
    /// Probability of drawing from the private pool instead of the shared
    /// pool; the distance knob between the two agents.
    pub mixing_rate: f64,
    pub sample_count: usize,
    pub response_len_min: usize,
    pub response_len_max: usize,
    /// Prompt length in tokens (prompts draw from the shared pool).
    pub prompt_len: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            shared_tokens: 24,
            positive_tokens: 96,
            negative_tokens: 96,
            mixing_rate: 0.35,
            sample_count: 3000,
            response_len_min: 6,
            response_len_max: 12,
            prompt_len: 3,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Err(Error::InvalidConfig { reason });
        if self.shared_tokens == 0 || self.positive_tokens == 0 || self.negative_tokens == 0 {
            return bad("every token pool needs at least one token".into());
        }
        if !(self.mixing_rate >= 0.0 && self.mixing_rate <= 1.0) {
            return bad(format!(
                "mixing_rate must be in [0, 1], got {}",
                self.mixing_rate
            ));
        }
        if self.sample_count == 0 {
            return bad("sample_count must be >= 1".into());
        }
        if self.response_len_min == 0 || self.response_len_min > self.response_len_max {
            return bad(format!(
                "need 1 <= response_len_min <= response_len_max, got {}..{}",
                self.response_len_min, self.response_len_max
            ));
        }
        Ok(())
    }

    fn shared_token(&self, i: usize) -> String {
        format!("s{i}")
    }

    fn positive_token(&self, i: usize) -> String {
        format!("p{i}")
    }

    fn negative_token(&self, i: usize) -> String {
        format!("n{i}")
    }

    fn stream_rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// The generator's exact discrepancy, one entry per generator token
/// (shared tokens included, at weight 0).
#[derive(Debug, Clone, PartialEq)]
pub struct TrueDiscrepancy {
    entries: Vec<(String, f64)>,
}

impl TrueDiscrepancy {
    #[must_use]
    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    #[must_use]
    pub fn weight_of(&self, token: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(t, _)| t == token)
            .map(|&(_, w)| w)
    }

    /// Rebuild from stored entries (for file round trips).
    #[must_use]
    pub fn from_entries(entries: Vec<(String, f64)>) -> Self {
        TrueDiscrepancy { entries }
    }
}

/// Per-sample ground truth: how many chosen-response tokens came from the
/// positive pool.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleAnnotation {
    pub id: String,
    pub preference_token_count: usize,
}

fn mixture_token<F>(
    rng: &mut ChaCha8Rng,
    spec: &SyntheticSpec,
    pool_len: usize,
    pool: F,
) -> (String, bool)
where
    F: Fn(usize) -> String,
{
    if rng.random_bool(spec.mixing_rate) {
        (pool(rng.random_range(0..pool_len)), true)
    } else {
        (
            spec.shared_token(rng.random_range(0..spec.shared_tokens)),
            false,
        )
    }
}

/// Generate the corpus: per sample, a shared-pool prompt, then a chosen
/// response from the positive agent and a rejected response from the
/// negative agent (lengths uniform in the configured range).
///
/// Draw order within a sample's stream: prompt tokens; chosen length;
/// chosen tokens (each one Bernoulli(mixing_rate), then a uniform pool
/// index); rejected length; rejected tokens.
pub fn generate(spec: &SyntheticSpec) -> Result<(Dataset, TrueDiscrepancy, Vec<SampleAnnotation>)> {
    spec.validate()?;
    let mut samples = Vec::with_capacity(spec.sample_count);
    let mut annotations = Vec::with_capacity(spec.sample_count);
    for i in 0..spec.sample_count {
        let mut rng = spec.stream_rng(i as u64);
        let prompt = (0..spec.prompt_len)
            .map(|_| spec.shared_token(rng.random_range(0..spec.shared_tokens)))
            .collect::<Vec<_>>()
            .join(" ");

        let chosen_len = rng.random_range(spec.response_len_min..=spec.response_len_max);
        let mut preference_token_count = 0;
        let chosen = (0..chosen_len)
            .map(|_| {
                let (token, private) = mixture_token(&mut rng, spec, spec.positive_tokens, |j| {
                    spec.positive_token(j)
                });
                if private {
                    preference_token_count += 1;
                }
                token
            })
            .collect::<Vec<_>>()
            .join(" ");

        let rejected_len = rng.random_range(spec.response_len_min..=spec.response_len_max);
        let rejected = (0..rejected_len)
            .map(|_| {
                mixture_token(&mut rng, spec, spec.negative_tokens, |j| {
                    spec.negative_token(j)
                })
                .0
            })
            .collect::<Vec<_>>()
            .join(" ");

        let id = format!("{i}");
        samples.push(PreferenceSample::new(
            id.clone(),
            prompt,
            alloc::vec![
                ResponseText {
                    text: chosen,
                    score: None,
                },
                ResponseText {
                    text: rejected,
                    score: None,
                },
            ],
            None,
        )?);
        annotations.push(SampleAnnotation {
            id,
            preference_token_count,
        });
    }

    let mut entries = Vec::new();
    for i in 0..spec.shared_tokens {
        entries.push((spec.shared_token(i), 0.0));
    }
    let pos_weight = spec.mixing_rate / spec.positive_tokens as f64;
    for i in 0..spec.positive_tokens {
        entries.push((spec.positive_token(i), pos_weight));
    }
    let neg_weight = -(spec.mixing_rate / spec.negative_tokens as f64);
    for i in 0..spec.negative_tokens {
        entries.push((spec.negative_token(i), neg_weight));
    }

    Ok((
        Dataset::new(samples)?,
        TrueDiscrepancy { entries },
        annotations,
    ))
}

/// Held-out prompts drawn the same way as training prompts but from the
/// streams after `sample_count`, so they never reuse sample randomness.
#[must_use]
pub fn held_out_prompts(spec: &SyntheticSpec, count: usize) -> Vec<Vec<String>> {
    (0..count)
        .map(|k| {
            let mut rng = spec.stream_rng((spec.sample_count + k) as u64);
            (0..spec.prompt_len)
                .map(|_| spec.shared_token(rng.random_range(0..spec.shared_tokens)))
                .collect()
        })
        .collect()
}

/// How well a model's next-token distribution aligns with the generator's
/// true discrepancy: for each prompt, the dot product of the true weights
/// with the model's next-token log-probabilities, averaged over prompts.
/// Positive means mass has shifted toward positive-pool tokens.
///
/// Truth tokens missing from the vocabulary are skipped (they never
/// occurred in the corpus the vocabulary was built from).
pub fn true_alignment_score(
    model: &ToyAutoregressiveModel,
    truth: &TrueDiscrepancy,
    vocab: &Vocab,
    prompts: &[Vec<u32>],
) -> Result<f64> {
    if prompts.is_empty() {
        return Err(Error::InvalidConfig {
            reason: "true_alignment_score needs at least one prompt".into(),
        });
    }
    if vocab.size() != model.vocab_size() {
        return Err(Error::VocabSizeMismatch {
            expected: model.vocab_size(),
            got: vocab.size(),
        });
    }
    let mut weights: Vec<(u32, f64)> = Vec::new();
    for (token, w) in &truth.entries {
        if let Some(id) = vocab.id(token) {
            weights.push((id, *w));
        }
    }
    let mut total = 0.0;
    for prompt in prompts {
        let context = prompt.last().copied().unwrap_or(Vocab::BOS_ID);
        let logp = model.log_probs(context)?;
        let mut score = 0.0;
        for &(id, w) in &weights {
            score += w * logp[id as usize];
        }
        total += score;
    }
    Ok(total / prompts.len() as f64)
}
