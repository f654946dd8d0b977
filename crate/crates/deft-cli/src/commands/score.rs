//! `deft score`: distribution reward per sample.

use std::path::PathBuf;

use clap::Args;

use deft_core::corpus::tokenize_dataset;
use deft_core::filter::ScoredSample;
use deft_core::reward::{
    averaged_logprobs_for_sample, distribution_reward, distribution_reward_sparse,
    distribution_reward_values,
};

use crate::error::{CliError, CliResult};
use crate::formats::dump::{self, DumpValues};
use crate::formats::{checkpoint, dataset, qdiff, scores, vocab};

const FORMATS: &str = "\
File formats:
  --data        Preference dataset, JSONL (see `deft extract --help`).
  --vocab       Plain text, one token per line; <unk> then <bos> first.
  --qdiff       Discrepancy TSV written by `deft extract`.
  --checkpoint  Binary toy-model checkpoint written by `deft train`.
  --dump        JSONL, one record per sample:
                {\"id\":..., \"avg_logprobs\":[...]}            (dense, one value
                per vocabulary entry) or
                {\"id\":..., \"sparse\":[[token_id, value], ...]} covering at
                least the discrepancy support.
  --dump-out    Dense dump JSONL computed from the checkpoint.
  --out         TSV with `# columns: id\\tsubset\\tR_Q`, one row per sample in
                dataset order.";

#[derive(Debug, Args)]
#[command(after_long_help = FORMATS)]
pub struct ScoreArgs {
    /// Preference dataset to score.
    #[arg(long, value_name = "FILE")]
    data: PathBuf,

    /// Vocabulary the discrepancy distribution is expressed over.
    #[arg(long, value_name = "FILE")]
    vocab: PathBuf,

    /// Discrepancy distribution from `deft extract`.
    #[arg(long, value_name = "FILE")]
    qdiff: PathBuf,

    /// Toy-model checkpoint supplying log-probabilities.
    #[arg(long, value_name = "FILE", required_unless_present = "dump")]
    checkpoint: Option<PathBuf>,

    /// Pre-averaged log-probability dump instead of a model.
    #[arg(
        long,
        value_name = "FILE",
        conflicts_with_all = ["checkpoint", "response_selector", "dump_out"]
    )]
    dump: Option<PathBuf>,

    /// Which responses feed the averaged log-probabilities.
    #[arg(long, value_enum, value_name = "WHICH", default_value = "chosen")]
    response_selector: super::SelectorArg,

    /// Also write the averaged vectors computed from the checkpoint.
    #[arg(long, value_name = "FILE")]
    dump_out: Option<PathBuf>,

    /// Write per-sample scores here.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

pub fn run(args: &ScoreArgs) -> CliResult<()> {
    let data = dataset::read_dataset(&args.data)?;
    let vocabulary = vocab::read_vocab(&args.vocab)?;
    let q_diff = qdiff::read_qdiff(&args.qdiff, &vocabulary)?;
    let samples = tokenize_dataset(&data, &vocabulary);

    let mut score_values = Vec::with_capacity(samples.len());
    let mut dump_records = Vec::new();

    if let Some(path) = &args.dump {
        let records = dump::read_dump(path)?;
        let known: std::collections::BTreeSet<&str> =
            samples.iter().map(|s| s.id.as_str()).collect();
        for record_id in records.keys() {
            if !known.contains(record_id.as_str()) {
                return Err(CliError::validation(format!(
                    "dump record {record_id} does not match any sample in {}",
                    args.data.display()
                )));
            }
        }
        for sample in &samples {
            let values = records.get(&sample.id).ok_or_else(|| {
                CliError::validation(format!(
                    "sample {} has no record in {}",
                    sample.id,
                    path.display()
                ))
            })?;
            let score = match values {
                DumpValues::Dense(avg) => distribution_reward_values(&q_diff, avg),
                DumpValues::Sparse(entries) => distribution_reward_sparse(&q_diff, entries),
            }
            .map_err(|e| e.for_sample(&sample.id))?;
            score_values.push(score);
        }
    } else {
        let path = args.checkpoint.as_ref().expect("clap requires a source");
        let model = checkpoint::read_checkpoint(path)?;
        if model.vocab_size() != vocabulary.size() {
            return Err(CliError::validation(format!(
                "checkpoint vocabulary size {} does not match vocabulary size {}",
                model.vocab_size(),
                vocabulary.size()
            )));
        }
        let selector = args.response_selector.into();
        for sample in &samples {
            let avg = averaged_logprobs_for_sample(&model, sample, selector)
                .map_err(|e| e.for_sample(&sample.id))?;
            let score = distribution_reward(&q_diff, &avg).map_err(|e| e.for_sample(&sample.id))?;
            score_values.push(score);
            if args.dump_out.is_some() {
                dump_records.push((sample.id.clone(), avg.values().to_vec()));
            }
        }
    }

    let rows: Vec<ScoredSample> = samples
        .iter()
        .zip(&score_values)
        .map(|(sample, &score)| ScoredSample {
            id: sample.id.clone(),
            subset: sample.subset.clone(),
            score,
        })
        .collect();
    for row in &rows {
        if !row.score.is_finite() {
            return Err(CliError::validation(format!(
                "sample {}: non-finite R_Q {}",
                row.id, row.score
            )));
        }
    }

    scores::write_scores(&args.out, &rows)?;
    if let Some(path) = &args.dump_out {
        dump::write_dump(path, &dump_records)?;
    }
    Ok(())
}
