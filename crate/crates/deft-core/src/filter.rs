//! Reward-based filtering: keep the lowest-scoring fraction of each subset.
//!
//! The quota applies per data subset so one easy subset cannot absorb the
//! whole budget; a global mode exists for unpartitioned data. Quotas use a
//! ceiling so a nonzero fraction always selects at least one sample.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// One sample's reward score, ready for filtering.
#[derive(Debug, Clone)]
pub struct ScoredSample {
    pub id: String,
    pub subset: Option<String>,
    pub score: f64,
}

/// The filter's verdict on one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterDecision {
    pub id: String,
    pub subset: Option<String>,
    pub score: f64,
    /// 0-based position in ascending score order within the sample's group.
    pub rank: usize,
    /// True when the sample falls inside the removal quota.
    pub selected: bool,
}

/// Per-group bookkeeping: how many samples, how many selected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSummary {
    pub subset: Option<String>,
    pub len: usize,
    pub quota: usize,
}

/// Number of samples to select from a group of `len` at `fraction`:
/// `ceil(fraction * len)`, clamped to `1..=len`.
///
/// The tiny epsilon keeps decimal fractions honest: `0.05 * 52420` is
/// exactly 2621 in the reals but lands a hair above it in binary floating
/// point, and a bare ceiling would overshoot to 2622.
#[must_use]
pub fn removal_quota(len: usize, fraction: f64) -> usize {
    let raw = math::ceil(fraction * len as f64 - 1e-9);
    let q = if raw < 1.0 { 1 } else { raw as usize };
    q.min(len)
}

/// Mark the lowest-scoring `fraction` of samples for removal.
///
/// With `group_by_subset` the quota applies within each subset
/// independently; otherwise one global quota applies. Ties on score break
/// toward the lexicographically smaller id, so the outcome is deterministic.
/// Decisions come back in input order; summaries are sorted by subset name
/// (the unpartitioned group first).
pub fn select_lowest(
    scored: &[ScoredSample],
    fraction: f64,
    group_by_subset: bool,
) -> Result<(Vec<FilterDecision>, Vec<SubsetSummary>)> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidFraction { fraction });
    }
    for s in scored {
        if !s.score.is_finite() {
            return Err(Error::NonFiniteScore {
                id: s.id.clone(),
                value: s.score,
            });
        }
    }

    let mut groups: BTreeMap<Option<&str>, Vec<usize>> = BTreeMap::new();
    for (i, s) in scored.iter().enumerate() {
        let key = if group_by_subset {
            s.subset.as_deref()
        } else {
            None
        };
        groups.entry(key).or_default().push(i);
    }

    let mut rank_of = alloc::vec![0usize; scored.len()];
    let mut selected = alloc::vec![false; scored.len()];
    let mut summaries = Vec::with_capacity(groups.len());
    for (key, mut members) in groups {
        members.sort_by(|&a, &b| {
            scored[a]
                .score
                .total_cmp(&scored[b].score)
                .then_with(|| scored[a].id.cmp(&scored[b].id))
        });
        let quota = removal_quota(members.len(), fraction);
        for (rank, &i) in members.iter().enumerate() {
            rank_of[i] = rank;
            selected[i] = rank < quota;
        }
        summaries.push(SubsetSummary {
            subset: key.map(String::from),
            len: members.len(),
            quota,
        });
    }

    let decisions = scored
        .iter()
        .enumerate()
        .map(|(i, s)| FilterDecision {
            id: s.id.clone(),
            subset: if group_by_subset {
                s.subset.clone()
            } else {
                None
            },
            score: s.score,
            rank: rank_of[i],
            selected: selected[i],
        })
        .collect();
    Ok((decisions, summaries))
}
