//! Distilling the discrepancy distribution from a preference corpus.
//!
//! Responses are classified positive or negative by min-max-normalized rank
//! score; token counts are pooled over all positive and all negative
//! responses corpus-wide, and the discrepancy weight of a token is the
//! difference of its relative frequencies in the two pools:
//!
//! ```text
//! w(i) = count_pos(i) / total_pos - count_neg(i) / total_neg
//! ```
//!
//! Weights are signed and sum to zero (up to rounding); tokens absent from
//! both pools have weight exactly 0.

use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::TokenizedSample;
use crate::error::{Error, Result};

/// Token-occurrence counts for one pool.
///
/// Tables over the same vocabulary can be merged, so counting distributes
/// over shards: `count(A ++ B) == merge(count(A), count(B))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    counts: Vec<u64>,
    total: u64,
}

impl CountTable {
    #[must_use]
    pub fn new(vocab_size: usize) -> Self {
        CountTable {
            counts: vec![0; vocab_size],
            total: 0,
        }
    }

    #[must_use]
    pub fn vocab_size(&self) -> usize {
        self.counts.len()
    }

    /// Count every id in `ids` once.
    pub fn add_ids(&mut self, ids: &[u32]) -> Result<()> {
        let vocab_size = self.counts.len();
        for &id in ids {
            let slot = self
                .counts
                .get_mut(id as usize)
                .ok_or(Error::TokenOutOfRange { id, vocab_size })?;
            *slot += 1;
            self.total += 1;
        }
        Ok(())
    }

    /// Fold another table into this one (vocabularies must match).
    pub fn merge(&mut self, other: &CountTable) -> Result<()> {
        if other.vocab_size() != self.vocab_size() {
            return Err(Error::VocabSizeMismatch {
                expected: self.vocab_size(),
                got: other.vocab_size(),
            });
        }
        for (slot, &n) in self.counts.iter_mut().zip(&other.counts) {
            *slot += n;
        }
        self.total += other.total;
        Ok(())
    }

    #[must_use]
    pub fn count(&self, id: u32) -> u64 {
        self.counts.get(id as usize).copied().unwrap_or(0)
    }

    #[must_use]
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Relative frequency of a token; 0 for an empty table.
    #[must_use]
    pub fn frequency(&self, id: u32) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(id) as f64 / self.total as f64
        }
    }
}

/// Min-max rank normalization: best response maps to 1, worst to 0.
///
/// When every score is equal the formula is degenerate; by convention the
/// first response still maps to 1.0 and the last to 0.0 (the ranking order
/// is authoritative), with any middle responses at 0.5.
///
/// Panics if fewer than two scores are given (samples guarantee `l >= 2`).
#[must_use]
pub fn min_max_normalize(scores: &[f64]) -> Vec<f64> {
    assert!(scores.len() >= 2, "need at least 2 scores to normalize");
    let best = scores[0];
    let worst = scores[scores.len() - 1];
    if best == worst {
        let l = scores.len();
        return (0..l)
            .map(|i| {
                if i == 0 {
                    1.0
                } else if i == l - 1 {
                    0.0
                } else {
                    0.5
                }
            })
            .collect();
    }
    scores
        .iter()
        .map(|&s| (s - worst) / (best - worst))
        .collect()
}

/// How a response participates in pooling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseLabel {
    Positive,
    Negative,
    /// Falls between the thresholds; excluded from both pools.
    Neither,
}

/// Classification thresholds on the normalized rank score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Normalized score at or above this is positive.
    pub tau_pos: f64,
    /// Normalized score at or below this is negative.
    pub tau_neg: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            tau_pos: 0.9,
            tau_neg: 0.1,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        let ok = self.tau_neg >= 0.0
            && self.tau_pos <= 1.0
            && self.tau_neg < self.tau_pos
            && self.tau_pos.is_finite()
            && self.tau_neg.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidThresholds {
                tau_pos: self.tau_pos,
                tau_neg: self.tau_neg,
            })
        }
    }
}

/// Label normalized scores against the thresholds.
pub fn classify_by_threshold(
    normalized: &[f64],
    thresholds: &Thresholds,
) -> Result<Vec<ResponseLabel>> {
    thresholds.validate()?;
    Ok(normalized
        .iter()
        .map(|&r| {
            if r >= thresholds.tau_pos {
                ResponseLabel::Positive
            } else if r <= thresholds.tau_neg {
                ResponseLabel::Negative
            } else {
                ResponseLabel::Neither
            }
        })
        .collect())
}

/// Classify one sample's responses: raw scores when present, positional
/// ranks otherwise, min-max normalized either way.
///
/// Because normalization pins the first response at 1 and the last at 0,
/// every sample contributes at least one positive and one negative response
/// under any valid thresholds.
pub fn classify_sample(
    sample: &TokenizedSample,
    thresholds: &Thresholds,
) -> Result<Vec<ResponseLabel>> {
    let normalized = min_max_normalize(&sample.response_scores());
    classify_by_threshold(&normalized, thresholds)
}

/// The distilled discrepancy distribution: one signed weight per vocabulary
/// token, positive where the positive pool is denser.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyDistribution {
    weights: Vec<f64>,
    positive_total: u64,
    negative_total: u64,
}

impl DiscrepancyDistribution {
    /// Difference of pool frequencies. Both pools must be non-empty and
    /// over the same vocabulary.
    pub fn from_counts(positive: &CountTable, negative: &CountTable) -> Result<Self> {
        if negative.vocab_size() != positive.vocab_size() {
            return Err(Error::VocabSizeMismatch {
                expected: positive.vocab_size(),
                got: negative.vocab_size(),
            });
        }
        if positive.total() == 0 {
            return Err(Error::EmptyPool { pool: "positive" });
        }
        if negative.total() == 0 {
            return Err(Error::EmptyPool { pool: "negative" });
        }
        let weights = (0..positive.vocab_size() as u32)
            .map(|id| positive.frequency(id) - negative.frequency(id))
            .collect();
        Ok(DiscrepancyDistribution {
            weights,
            positive_total: positive.total(),
            negative_total: negative.total(),
        })
    }

    /// Rebuild from stored weights (e.g. a distribution file). Weights must
    /// be finite; totals are carried for reporting only.
    pub fn from_weights(
        weights: Vec<f64>,
        positive_total: u64,
        negative_total: u64,
    ) -> Result<Self> {
        for (id, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFiniteScore {
                    id: alloc::format!("weight[{id}]"),
                    value: w,
                });
            }
        }
        Ok(DiscrepancyDistribution {
            weights,
            positive_total,
            negative_total,
        })
    }

    #[must_use]
    pub fn vocab_size(&self) -> usize {
        self.weights.len()
    }

    #[must_use]
    pub fn weight(&self, id: u32) -> f64 {
        self.weights.get(id as usize).copied().unwrap_or(0.0)
    }

    #[must_use]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Tokens with nonzero weight, in ascending id order.
    pub fn support(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .filter(|&(_, &w)| w != 0.0)
            .map(|(id, &w)| (id as u32, w))
    }

    /// Sum of all weights (should be ~0 for a freshly distilled table).
    #[must_use]
    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    #[must_use]
    pub fn positive_total(&self) -> u64 {
        self.positive_total
    }

    #[must_use]
    pub fn negative_total(&self) -> u64 {
        self.negative_total
    }
}

/// Distill the discrepancy distribution from tokenized samples: classify
/// every response, pool token counts (prompts excluded, `Neither` responses
/// skipped), and difference the pool frequencies. One global pair of pools
/// per call; group samples upstream for per-subset distillation.
pub fn extract_discrepancy(
    samples: &[TokenizedSample],
    vocab_size: usize,
    thresholds: &Thresholds,
) -> Result<DiscrepancyDistribution> {
    let mut positive = CountTable::new(vocab_size);
    let mut negative = CountTable::new(vocab_size);
    for sample in samples {
        let labels = classify_sample(sample, thresholds).map_err(|e| e.for_sample(&sample.id))?;
        for (response, label) in sample.responses.iter().zip(&labels) {
            let pool = match label {
                ResponseLabel::Positive => &mut positive,
                ResponseLabel::Negative => &mut negative,
                ResponseLabel::Neither => continue,
            };
            pool.add_ids(&response.ids)
                .map_err(|e| e.for_sample(&sample.id))?;
        }
    }
    DiscrepancyDistribution::from_counts(&positive, &negative)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_vocab, tokenize_dataset, Dataset, PreferenceSample, ResponseText};

    fn pair(id: &str, chosen: &str, rejected: &str) -> PreferenceSample {
        PreferenceSample::new(
            id.into(),
            "p".into(),
            vec![
                ResponseText {
                    text: chosen.into(),
                    score: None,
                },
                ResponseText {
                    text: rejected.into(),
                    score: None,
                },
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn min_max_normalizes_to_unit_interval() {
        assert_eq!(min_max_normalize(&[3.0, 1.0]), vec![1.0, 0.0]);
        assert_eq!(min_max_normalize(&[5.0, 4.0, 1.0]), vec![1.0, 0.75, 0.0]);
    }

    #[test]
    fn min_max_degenerate_keeps_rank_order() {
        assert_eq!(min_max_normalize(&[2.0, 2.0]), vec![1.0, 0.0]);
        assert_eq!(min_max_normalize(&[2.0, 2.0, 2.0]), vec![1.0, 0.5, 0.0]);
    }

    #[test]
    fn classify_uses_inclusive_thresholds() {
        let th = Thresholds::default();
        assert_eq!(
            classify_by_threshold(&[1.0, 0.75, 0.0], &th).unwrap(),
            vec![
                ResponseLabel::Positive,
                ResponseLabel::Neither,
                ResponseLabel::Negative
            ]
        );
        assert_eq!(
            classify_by_threshold(&[1.0, 0.95, 0.0], &th).unwrap(),
            vec![
                ResponseLabel::Positive,
                ResponseLabel::Positive,
                ResponseLabel::Negative
            ]
        );
    }

    #[test]
    fn classify_rejects_bad_thresholds() {
        let th = Thresholds {
            tau_pos: 0.1,
            tau_neg: 0.9,
        };
        assert!(matches!(
            classify_by_threshold(&[1.0, 0.0], &th),
            Err(Error::InvalidThresholds { .. })
        ));
    }

    /// Positives {"a b", "a c"}, negatives {"a b", "b d"}:
    /// positive frequencies a=1/2 b=1/4 c=1/4, negative a=1/4 b=1/2 d=1/4,
    /// so weights are a=+1/4, b=-1/4, c=+1/4, d=-1/4.
    #[test]
    fn extraction_differences_pool_frequencies() {
        let ds = Dataset::new(vec![pair("0", "a b", "a b"), pair("1", "a c", "b d")]).unwrap();
        let vocab = build_vocab(&ds, 1).unwrap();
        let samples = tokenize_dataset(&ds, &vocab);
        let q = extract_discrepancy(&samples, vocab.size(), &Thresholds::default()).unwrap();
        let w = |t: &str| q.weight(vocab.id(t).unwrap());
        assert_eq!(w("a"), 0.25);
        assert_eq!(w("b"), -0.25);
        assert_eq!(w("c"), 0.25);
        assert_eq!(w("d"), -0.25);
        assert_eq!(q.weight(0), 0.0); // <unk> absent from both pools
        assert_eq!(q.positive_total(), 4);
        assert_eq!(q.negative_total(), 4);
    }

    #[test]
    fn identical_pools_give_exactly_zero_weights() {
        let ds = Dataset::new(vec![pair("0", "a b c", "a b c")]).unwrap();
        let vocab = build_vocab(&ds, 1).unwrap();
        let samples = tokenize_dataset(&ds, &vocab);
        let q = extract_discrepancy(&samples, vocab.size(), &Thresholds::default()).unwrap();
        assert!(q.weights().iter().all(|&w| w == 0.0));
    }

    #[test]
    fn swapping_pools_negates_weights_exactly() {
        let ds = Dataset::new(vec![pair("0", "a a b", "b c")]).unwrap();
        let swapped = Dataset::new(vec![pair("0", "b c", "a a b")]).unwrap();
        let vocab = build_vocab(&ds, 1).unwrap();
        let q = extract_discrepancy(
            &tokenize_dataset(&ds, &vocab),
            vocab.size(),
            &Thresholds::default(),
        )
        .unwrap();
        let r = extract_discrepancy(
            &tokenize_dataset(&swapped, &vocab),
            vocab.size(),
            &Thresholds::default(),
        )
        .unwrap();
        for id in 0..vocab.size() as u32 {
            // Exact negation; zero-weight tokens compare numerically so the
            // sign of zero doesn't matter.
            assert_eq!(q.weight(id), -r.weight(id));
            if q.weight(id) != 0.0 {
                assert_eq!(q.weight(id).to_bits(), (-r.weight(id)).to_bits());
            }
        }
    }

    #[test]
    fn duplicating_the_corpus_leaves_weights_bit_identical() {
        let ds = Dataset::new(vec![pair("0", "a a b", "b c d")]).unwrap();
        let vocab = build_vocab(&ds, 1).unwrap();
        let once = tokenize_dataset(&ds, &vocab);
        let mut thrice = Vec::new();
        for k in 0..3 {
            for s in &once {
                let mut s = s.clone();
                s.id = alloc::format!("{}-{}", s.id, k);
                thrice.push(s);
            }
        }
        let q1 = extract_discrepancy(&once, vocab.size(), &Thresholds::default()).unwrap();
        let q3 = extract_discrepancy(&thrice, vocab.size(), &Thresholds::default()).unwrap();
        for id in 0..vocab.size() as u32 {
            assert_eq!(q1.weight(id).to_bits(), q3.weight(id).to_bits());
        }
    }

    #[test]
    fn merge_matches_single_pass_counting() {
        let mut a = CountTable::new(4);
        let mut b = CountTable::new(4);
        a.add_ids(&[2, 2, 3]).unwrap();
        b.add_ids(&[3, 0]).unwrap();
        let mut merged = CountTable::new(4);
        merged.merge(&a).unwrap();
        merged.merge(&b).unwrap();
        let mut whole = CountTable::new(4);
        whole.add_ids(&[2, 2, 3, 3, 0]).unwrap();
        assert_eq!(merged, whole);
    }

    #[test]
    fn count_table_rejects_out_of_range_ids() {
        let mut t = CountTable::new(2);
        assert!(matches!(
            t.add_ids(&[5]),
            Err(Error::TokenOutOfRange { id: 5, .. })
        ));
    }

    #[test]
    fn empty_pool_is_an_error() {
        let pos = CountTable::new(4);
        let mut neg = CountTable::new(4);
        neg.add_ids(&[2]).unwrap();
        assert!(matches!(
            DiscrepancyDistribution::from_counts(&pos, &neg),
            Err(Error::EmptyPool { pool: "positive" })
        ));
    }
}
