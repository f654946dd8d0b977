//! Helpers shared by the integration tests.
#![allow(dead_code)]

use deft_core::corpus::{build_vocab, tokenize_dataset, TokenizedSample, Vocab};
use deft_core::distill::{extract_discrepancy, DiscrepancyDistribution, Thresholds};
use deft_core::filter::{select_lowest, ScoredSample};
use deft_core::synth::{generate, SampleAnnotation, SyntheticSpec, TrueDiscrepancy};
use deft_core::toylm::{ModelInit, ToyAutoregressiveModel};
use deft_core::train::{run_training, Method, TrainConfig};

/// Everything the generator and distillation stages produce for one spec.
pub struct Stage {
    pub vocab: Vocab,
    pub samples: Vec<TokenizedSample>,
    pub q_diff: DiscrepancyDistribution,
    pub truth: TrueDiscrepancy,
    pub annotations: Vec<SampleAnnotation>,
}

pub fn stage(spec: &SyntheticSpec) -> Stage {
    let (dataset, truth, annotations) = generate(spec).expect("valid spec");
    let vocab = build_vocab(&dataset, 1).expect("non-empty corpus");
    let samples = tokenize_dataset(&dataset, &vocab);
    let q_diff =
        extract_discrepancy(&samples, vocab.size(), &Thresholds::default()).expect("extract");
    Stage {
        vocab,
        samples,
        q_diff,
        truth,
        annotations,
    }
}

/// The scoring model: a zero-initialized bigram model after `epochs` of
/// plain SFT over the full corpus.
pub fn sft_model(st: &Stage, epochs: usize, lr: f64, seed: u64) -> ToyAutoregressiveModel {
    let mut model =
        ToyAutoregressiveModel::new(st.vocab.size(), ModelInit::Zero, seed).expect("model");
    if epochs > 0 {
        let cfg = TrainConfig {
            method: Method::Sft,
            omega: 0.0,
            rq_in_loss: false,
            epochs,
            learning_rate: lr,
            seed,
            ..TrainConfig::default()
        };
        run_training(&mut model, &st.samples, None, None, None, &cfg).expect("sft stage");
    }
    model
}

/// The lowest-scoring `fraction` of the samples, in dataset order.
pub fn lowest_subset(
    samples: &[TokenizedSample],
    scores: &[f64],
    fraction: f64,
) -> Vec<TokenizedSample> {
    let scored: Vec<ScoredSample> = samples
        .iter()
        .zip(scores)
        .map(|(s, &score)| ScoredSample {
            id: s.id.clone(),
            subset: s.subset.clone(),
            score,
        })
        .collect();
    let (decisions, _) = select_lowest(&scored, fraction, true).expect("select");
    samples
        .iter()
        .zip(&decisions)
        .filter(|(_, d)| d.selected)
        .map(|(s, _)| s.clone())
        .collect()
}

/// Average ranks (ties share their mean rank), 1-based.
pub fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = shared;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let rx = ranks(x);
    let ry = ranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for i in 0..x.len() {
        cov += (rx[i] - mx) * (ry[i] - my);
        vx += (rx[i] - mx) * (rx[i] - mx);
        vy += (ry[i] - my) * (ry[i] - my);
    }
    cov / (vx.sqrt() * vy.sqrt())
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// L1 distance between an extracted distribution and the generator's truth,
/// summed over the union of both supports.
pub fn l1_to_truth(st: &Stage) -> f64 {
    let mut total = 0.0;
    let mut covered = vec![false; st.vocab.size()];
    for (token, w) in st.truth.entries() {
        match st.vocab.id(token) {
            Some(id) => {
                covered[id as usize] = true;
                total += (st.q_diff.weight(id) - w).abs();
            }
            None => total += w.abs(),
        }
    }
    for (id, was_covered) in covered.iter().enumerate() {
        if !was_covered {
            total += st.q_diff.weight(id as u32).abs();
        }
    }
    total
}
