//! Corpus-shift reports and filter-fraction sweeps.
//!
//! The shift report compares token statistics between two corpora (say,
//! generations before and after guided training) and histograms the
//! absolute changes into the conventional buckets; most tokens landing in
//! the lowest bucket is the signature of a *minimal* distribution shift.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// |delta count| bucket edges; the last bucket is open-ended.
pub const DEFAULT_COUNT_EDGES: [f64; 6] = [0.0, 5.0, 20.0, 50.0, 100.0, 200.0];

/// |delta frequency| bucket edges in percentage points.
pub const DEFAULT_FREQUENCY_EDGES_PP: [f64; 6] = [0.0, 0.001, 0.005, 0.01, 0.02, 0.05];

/// Shift of one token between corpus A and corpus B.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenShift {
    pub token: u32,
    pub count_a: u64,
    pub count_b: u64,
    /// `count_b - count_a`.
    pub delta_count: i64,
    /// `freq_b - freq_a`, in percentage points.
    pub delta_frequency_pp: f64,
}

/// Histogram over `[edges[i], edges[i+1])` intervals, the last open-ended.
#[derive(Debug, Clone, PartialEq)]
pub struct BucketTable {
    pub edges: Vec<f64>,
    /// Percent of token *types* per bucket.
    pub type_percent: Vec<f64>,
    /// Percent of token *occurrences* (weighted by combined count).
    pub occurrence_percent: Vec<f64>,
}

impl BucketTable {
    fn build(edges: &[f64], values: impl Iterator<Item = (f64, u64)> + Clone) -> Self {
        let mut type_counts = alloc::vec![0u64; edges.len()];
        let mut occ_counts = alloc::vec![0u64; edges.len()];
        let mut total_types = 0u64;
        let mut total_occ = 0u64;
        for (value, weight) in values {
            let mut bucket = 0;
            for (i, &edge) in edges.iter().enumerate() {
                if value >= edge {
                    bucket = i;
                } else {
                    break;
                }
            }
            type_counts[bucket] += 1;
            occ_counts[bucket] += weight;
            total_types += 1;
            total_occ += weight;
        }
        let percent = |n: u64, total: u64| {
            if total == 0 {
                0.0
            } else {
                100.0 * n as f64 / total as f64
            }
        };
        BucketTable {
            edges: edges.to_vec(),
            type_percent: type_counts
                .iter()
                .map(|&n| percent(n, total_types))
                .collect(),
            occurrence_percent: occ_counts.iter().map(|&n| percent(n, total_occ)).collect(),
        }
    }
}

/// Full shift report between two corpora.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftReport {
    /// Every token occurring in either corpus, most-shifted first
    /// (descending |delta count|, then descending |delta frequency|, then
    /// ascending token id).
    pub tokens: Vec<TokenShift>,
    pub total_a: u64,
    pub total_b: u64,
    pub count_buckets: BucketTable,
    pub frequency_buckets: BucketTable,
}

fn validate_edges(edges: &[f64]) -> Result<()> {
    let ok = !edges.is_empty()
        && edges[0] == 0.0
        && edges.windows(2).all(|w| w[0] < w[1])
        && edges.iter().all(|e| e.is_finite());
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidConfig {
            reason: "bucket edges must be finite, strictly increasing, and start at 0".into(),
        })
    }
}

/// Shift report with the conventional bucket edges.
pub fn distribution_shift(
    corpus_a: &[Vec<u32>],
    corpus_b: &[Vec<u32>],
    vocab_size: usize,
) -> Result<ShiftReport> {
    distribution_shift_with_edges(
        corpus_a,
        corpus_b,
        vocab_size,
        &DEFAULT_COUNT_EDGES,
        &DEFAULT_FREQUENCY_EDGES_PP,
    )
}

/// Shift report with caller-chosen bucket edges.
pub fn distribution_shift_with_edges(
    corpus_a: &[Vec<u32>],
    corpus_b: &[Vec<u32>],
    vocab_size: usize,
    count_edges: &[f64],
    frequency_edges_pp: &[f64],
) -> Result<ShiftReport> {
    validate_edges(count_edges)?;
    validate_edges(frequency_edges_pp)?;
    let mut counts_a = alloc::vec![0u64; vocab_size];
    let mut counts_b = alloc::vec![0u64; vocab_size];
    for (corpus, counts) in [(corpus_a, &mut counts_a), (corpus_b, &mut counts_b)] {
        for line in corpus {
            for &id in line {
                let slot = counts
                    .get_mut(id as usize)
                    .ok_or(Error::TokenOutOfRange { id, vocab_size })?;
                *slot += 1;
            }
        }
    }
    let total_a: u64 = counts_a.iter().sum();
    let total_b: u64 = counts_b.iter().sum();
    if total_a == 0 || total_b == 0 {
        return Err(Error::InvalidConfig {
            reason: "both corpora must contain at least one token".into(),
        });
    }

    let mut tokens = Vec::new();
    for id in 0..vocab_size {
        let (ca, cb) = (counts_a[id], counts_b[id]);
        if ca == 0 && cb == 0 {
            continue;
        }
        let freq_a = ca as f64 / total_a as f64;
        let freq_b = cb as f64 / total_b as f64;
        tokens.push(TokenShift {
            token: id as u32,
            count_a: ca,
            count_b: cb,
            delta_count: cb as i64 - ca as i64,
            delta_frequency_pp: (freq_b - freq_a) * 100.0,
        });
    }
    tokens.sort_by(|x, y| {
        y.delta_count
            .abs()
            .cmp(&x.delta_count.abs())
            .then_with(|| {
                math::abs(y.delta_frequency_pp).total_cmp(&math::abs(x.delta_frequency_pp))
            })
            .then_with(|| x.token.cmp(&y.token))
    });

    let count_buckets = BucketTable::build(
        count_edges,
        tokens
            .iter()
            .map(|t| (t.delta_count.unsigned_abs() as f64, t.count_a + t.count_b)),
    );
    let frequency_buckets = BucketTable::build(
        frequency_edges_pp,
        tokens
            .iter()
            .map(|t| (math::abs(t.delta_frequency_pp), t.count_a + t.count_b)),
    );

    Ok(ShiftReport {
        tokens,
        total_a,
        total_b,
        count_buckets,
        frequency_buckets,
    })
}

/// Result of one full pipeline run inside a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineRun {
    /// How many samples the filter kept for training.
    pub quota: usize,
    /// The headline metric (e.g. the true-alignment score).
    pub metric: f64,
}

/// One sweep grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub fraction: f64,
    pub seed: u64,
    pub quota: usize,
    pub metric: f64,
}

/// All grid points plus the per-fraction medians.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// `(fraction, median metric over seeds)`, in the input fraction order.
    pub medians: Vec<(f64, f64)>,
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Run `pipeline(fraction, seed)` over the whole grid and aggregate.
/// Fractions must lie in (0, 1]; at least one fraction and one seed are
/// required. Errors from the pipeline closure abort the sweep.
pub fn fraction_sweep<F>(fractions: &[f64], seeds: &[u64], mut pipeline: F) -> Result<SweepResult>
where
    F: FnMut(f64, u64) -> Result<PipelineRun>,
{
    if fractions.is_empty() || seeds.is_empty() {
        return Err(Error::InvalidConfig {
            reason: "sweep needs at least one fraction and one seed".into(),
        });
    }
    for &fraction in fractions {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::InvalidFraction { fraction });
        }
    }
    let mut rows = Vec::with_capacity(fractions.len() * seeds.len());
    let mut medians = Vec::with_capacity(fractions.len());
    for &fraction in fractions {
        let mut metrics = Vec::with_capacity(seeds.len());
        for &seed in seeds {
            let run = pipeline(fraction, seed)?;
            metrics.push(run.metric);
            rows.push(SweepRow {
                fraction,
                seed,
                quota: run.quota,
                metric: run.metric,
            });
        }
        medians.push((fraction, median(metrics)));
    }
    Ok(SweepResult { rows, medians })
}
