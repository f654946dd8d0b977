//! Randomized algebraic invariants of distillation, reward, and filtering.
//!
//! Each property re-derives the expected answer with an independent oracle
//! (brute-force recount, linear search, exhaustive comparison) rather than
//! calling back into the code under test.

use proptest::prelude::*;

use deft_core::corpus::{TokenizedResponse, TokenizedSample, Vocab};
use deft_core::distill::{
    extract_discrepancy, min_max_normalize, DiscrepancyDistribution, Thresholds,
};
use deft_core::filter::{removal_quota, select_lowest, ScoredSample};
use deft_core::reward::{distribution_reward_sparse, distribution_reward_values};

/// A batch of unscored preference samples over token ids `0..v`.
fn arb_samples(v: usize) -> impl Strategy<Value = Vec<TokenizedSample>> {
    let response = prop::collection::vec(0..v as u32, 1..6);
    let sample = (
        prop::collection::vec(0..v as u32, 0..3),
        prop::collection::vec(response, 2..4),
    );
    prop::collection::vec(sample, 1..12).prop_map(|raw| {
        raw.into_iter()
            .enumerate()
            .map(|(i, (prompt, responses))| TokenizedSample {
                id: format!("s{i}"),
                subset: None,
                prompt,
                responses: responses
                    .into_iter()
                    .map(|ids| TokenizedResponse { ids, score: None })
                    .collect(),
            })
            .collect()
    })
}

/// Independent recount: with implicit positional ranks, min-max
/// normalization always labels the first response positive and the last
/// negative, so the oracle just counts those two directly.
fn oracle_weights(samples: &[TokenizedSample], v: usize) -> Vec<f64> {
    let mut pos = vec![0u64; v];
    let mut neg = vec![0u64; v];
    let mut pos_total = 0u64;
    let mut neg_total = 0u64;
    for s in samples {
        for &id in &s.responses[0].ids {
            pos[id as usize] += 1;
            pos_total += 1;
        }
        for &id in &s.responses[s.responses.len() - 1].ids {
            neg[id as usize] += 1;
            neg_total += 1;
        }
    }
    (0..v)
        .map(|i| pos[i] as f64 / pos_total as f64 - neg[i] as f64 / neg_total as f64)
        .collect()
}

fn arb_qdiff(v: usize) -> impl Strategy<Value = DiscrepancyDistribution> {
    arb_samples(v)
        .prop_map(move |samples| extract_discrepancy(&samples, v, &Thresholds::default()).unwrap())
}

proptest! {
    #[test]
    fn extraction_matches_the_recount_oracle_and_sums_to_zero(
        samples in (4usize..16).prop_flat_map(|v| (Just(v), arb_samples(v)))
    ) {
        let (v, samples) = samples;
        let q = extract_discrepancy(&samples, v, &Thresholds::default()).unwrap();
        let oracle = oracle_weights(&samples, v);
        prop_assert_eq!(q.weights(), &oracle[..]);
        prop_assert!(q.weight_sum().abs() < 1e-9);
    }

    #[test]
    fn reversing_every_ranking_negates_the_weights(
        samples in (4usize..16).prop_flat_map(|v| (Just(v), arb_samples(v)))
    ) {
        let (v, samples) = samples;
        let forward = extract_discrepancy(&samples, v, &Thresholds::default()).unwrap();
        let reversed: Vec<TokenizedSample> = samples
            .iter()
            .map(|s| {
                let mut flipped = s.clone();
                flipped.responses.reverse();
                flipped
            })
            .collect();
        let backward = extract_discrepancy(&reversed, v, &Thresholds::default()).unwrap();
        for (a, b) in forward.weights().iter().zip(backward.weights()) {
            prop_assert_eq!(*a, -*b);
            if *a != 0.0 {
                prop_assert_eq!(a.to_bits(), (-b).to_bits());
            }
        }
    }

    #[test]
    fn duplicating_the_corpus_changes_nothing(
        samples in (4usize..16).prop_flat_map(|v| (Just(v), arb_samples(v)))
    ) {
        let (v, samples) = samples;
        let single = extract_discrepancy(&samples, v, &Thresholds::default()).unwrap();
        let mut doubled = samples.clone();
        doubled.extend(samples.iter().map(|s| {
            let mut copy = s.clone();
            copy.id = format!("{}-copy", s.id);
            copy
        }));
        let twice = extract_discrepancy(&doubled, v, &Thresholds::default()).unwrap();
        for (a, b) in single.weights().iter().zip(twice.weights()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn min_max_normalization_pins_the_extremes(
        raw in prop::collection::vec(-1e3f64..1e3, 2..10)
    ) {
        // Ranked scores are non-increasing by contract (best first).
        let mut scores = raw;
        scores.sort_by(|a, b| b.total_cmp(a));
        let normalized = min_max_normalize(&scores);
        prop_assert!(normalized.iter().all(|&x| (0.0..=1.0).contains(&x)));
        prop_assert_eq!(normalized[0], 1.0);
        prop_assert_eq!(normalized[scores.len() - 1], 0.0);
        for pair in normalized.windows(2) {
            prop_assert!(pair[0] >= pair[1], "normalization must preserve the ranking");
        }
    }

    #[test]
    fn min_max_normalization_breaks_all_equal_ties_by_rank(
        (value, len) in (-1e3f64..1e3, 2usize..8)
    ) {
        let normalized = min_max_normalize(&vec![value; len]);
        prop_assert_eq!(normalized[0], 1.0);
        prop_assert_eq!(normalized[len - 1], 0.0);
        for &mid in &normalized[1..len - 1] {
            prop_assert_eq!(mid, 0.5);
        }
    }

    #[test]
    fn reward_is_shift_invariant(
        (q, values, shift) in (4usize..16).prop_flat_map(|v| (
            arb_qdiff(v),
            prop::collection::vec(-10.0f64..0.0, v..=v),
            -5.0f64..5.0,
        ))
    ) {
        let base = distribution_reward_values(&q, &values).unwrap();
        let shifted: Vec<f64> = values.iter().map(|x| x + shift).collect();
        let moved = distribution_reward_values(&q, &shifted).unwrap();
        prop_assert!((base - moved).abs() < 1e-9, "{base} vs {moved}");
    }

    #[test]
    fn reward_is_linear_in_the_weights(
        (q, values, alpha) in (4usize..16).prop_flat_map(|v| (
            arb_qdiff(v),
            prop::collection::vec(-10.0f64..0.0, v..=v),
            prop_oneof![-8.0f64..-0.1, 0.1f64..8.0],
        ))
    ) {
        let base = distribution_reward_values(&q, &values).unwrap();
        let scaled = DiscrepancyDistribution::from_weights(
            q.weights().iter().map(|w| w * alpha).collect(),
            q.positive_total(),
            q.negative_total(),
        )
        .unwrap();
        let got = distribution_reward_values(&scaled, &values).unwrap();
        let want = alpha * base;
        prop_assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{got} vs {want}");
    }

    #[test]
    fn reward_negates_with_the_distribution_exactly(
        (q, values) in (4usize..16).prop_flat_map(|v| (
            arb_qdiff(v),
            prop::collection::vec(-10.0f64..0.0, v..=v),
        ))
    ) {
        let base = distribution_reward_values(&q, &values).unwrap();
        let negated = DiscrepancyDistribution::from_weights(
            q.weights().iter().map(|w| -w).collect(),
            q.negative_total(),
            q.positive_total(),
        )
        .unwrap();
        let flipped = distribution_reward_values(&negated, &values).unwrap();
        // Adding +0.0 canonicalizes the sign of zero before the bit compare:
        // when the reward is exactly zero, `-base` is -0.0 but a recomputed
        // sum rounds to +0.0 (IEEE addition never yields -0.0 from
        // cancellation), so negation is bit-exact only up to zero's sign.
        prop_assert_eq!((flipped + 0.0).to_bits(), (-base + 0.0).to_bits());
    }

    #[test]
    fn reward_strictly_tracks_single_token_changes(
        (q, values, pick, delta) in (4usize..16).prop_flat_map(|v| (
            arb_qdiff(v),
            prop::collection::vec(-10.0f64..0.0, v..=v),
            any::<prop::sample::Index>(),
            0.25f64..2.0,
        ))
    ) {
        let support: Vec<(u32, f64)> = q.support().collect();
        prop_assume!(!support.is_empty());
        let (id, w) = support[pick.index(support.len())];
        let base = distribution_reward_values(&q, &values).unwrap();
        let mut bumped = values.clone();
        bumped[id as usize] += delta;
        let moved = distribution_reward_values(&q, &bumped).unwrap();
        if w > 0.0 {
            prop_assert!(moved > base, "raising a positive-weight token must raise R_Q");
        } else {
            prop_assert!(moved < base, "raising a negative-weight token must lower R_Q");
        }
    }

    #[test]
    fn sparse_scoring_is_order_independent_and_matches_dense(
        (q, values, rotation) in (4usize..16).prop_flat_map(|v| (
            arb_qdiff(v),
            prop::collection::vec(-10.0f64..0.0, v..=v),
            any::<usize>(),
        ))
    ) {
        let dense = distribution_reward_values(&q, &values).unwrap();
        let mut pairs: Vec<(u32, f64)> = values
            .iter()
            .enumerate()
            .map(|(i, &x)| (i as u32, x))
            .collect();
        let turn = rotation % pairs.len().max(1);
        pairs.rotate_left(turn);
        let sparse = distribution_reward_sparse(&q, &pairs).unwrap();
        prop_assert_eq!(sparse.to_bits(), dense.to_bits());
    }

    #[test]
    fn quota_matches_a_linear_search_oracle(
        len in 1usize..3000,
        fraction in prop_oneof![
            (1u32..=100).prop_map(|p| p as f64 / 100.0),
            0.0001f64..1.0,
        ]
    ) {
        let quota = removal_quota(len, fraction);
        // Smallest k with k >= fraction*len, forgiving float dust, floored
        // at one sample.
        let oracle = (0..=len)
            .find(|&k| k as f64 >= fraction * len as f64 - 1e-9)
            .unwrap()
            .max(1);
        prop_assert_eq!(quota, oracle);
    }

    #[test]
    fn selection_keeps_exactly_the_lowest_scores_per_subset(
        (scores, fraction) in (
            prop::collection::vec((0.0f64..1.0, 0u8..3), 1..60),
            0.01f64..=1.0,
        )
    ) {
        let scored: Vec<ScoredSample> = scores
            .iter()
            .enumerate()
            .map(|(i, &(score, subset))| ScoredSample {
                id: format!("id{i:03}"),
                subset: (subset > 0).then(|| format!("part{subset}")),
                score,
            })
            .collect();
        let (decisions, summaries) = select_lowest(&scored, fraction, true).unwrap();

        // Decisions come back in input order.
        for (d, s) in decisions.iter().zip(&scored) {
            prop_assert_eq!(&d.id, &s.id);
        }
        // Summaries describe each group faithfully.
        let mut selected_total = 0usize;
        for summary in &summaries {
            prop_assert_eq!(summary.quota, removal_quota(summary.len, fraction));
            let mut members: Vec<(f64, &str)> = decisions
                .iter()
                .filter(|d| d.subset == summary.subset)
                .map(|d| (d.score, d.id.as_str()))
                .collect();
            prop_assert_eq!(members.len(), summary.len);
            members.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));
            let expected: std::collections::BTreeSet<&str> = members[..summary.quota]
                .iter()
                .map(|&(_, id)| id)
                .collect();
            for d in decisions.iter().filter(|d| d.subset == summary.subset) {
                prop_assert_eq!(d.selected, expected.contains(d.id.as_str()), "{}", d.id);
                prop_assert!(d.rank < summary.len);
            }
            selected_total += summary.quota;
        }
        prop_assert_eq!(decisions.iter().filter(|d| d.selected).count(), selected_total);
    }

    #[test]
    fn smaller_fractions_select_nested_subsets(
        (scores, lo, hi) in (
            prop::collection::vec(0.0f64..1.0, 2..50),
            0.01f64..0.5,
            0.5f64..=1.0,
        )
    ) {
        let scored: Vec<ScoredSample> = scores
            .iter()
            .enumerate()
            .map(|(i, &score)| ScoredSample {
                id: format!("id{i:03}"),
                subset: None,
                score,
            })
            .collect();
        let pick = |fraction: f64| {
            let (decisions, _) = select_lowest(&scored, fraction, false).unwrap();
            decisions
                .into_iter()
                .filter(|d| d.selected)
                .map(|d| d.id)
                .collect::<std::collections::BTreeSet<_>>()
        };
        let small = pick(lo);
        let large = pick(hi);
        prop_assert!(small.is_subset(&large));
        prop_assert_eq!(pick(1.0).len(), scored.len());
    }

    #[test]
    fn vocabulary_ids_round_trip(
        names in prop::collection::btree_set("[a-z]{1,6}", 1..40)
    ) {
        let vocab = Vocab::from_tokens(names.iter().cloned()).unwrap();
        prop_assert_eq!(vocab.size(), names.len() + 2);
        for name in &names {
            let id = vocab.id(name).unwrap();
            prop_assert_eq!(vocab.token(id), Some(name.as_str()));
        }
        prop_assert_eq!(vocab.id_or_unk("definitely-not-present"), Vocab::UNK_ID);
    }
}
