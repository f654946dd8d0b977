//! `deft extract`: preference dataset in, discrepancy distribution out.

use std::path::PathBuf;

use clap::Args;

use deft_core::corpus::{build_vocab, tokenize_dataset};
use deft_core::distill::{extract_discrepancy, Thresholds};

use crate::error::CliResult;
use crate::formats::{dataset, qdiff, vocab};

const FORMATS: &str = "\
File formats:
  --data        JSONL, one sample per line:
                {\"id\":..., \"prompt\":..., \"responses\":[{\"text\":..., \"score\":...}, ...], \"subset\":...}
                Responses are ranked best-first; explicit scores, if present,
                must be finite, non-increasing, and set on every response.
  --vocab,      Plain text, one token per line; lines 1-2 are the reserved
  --vocab-out   <unk> and <bos> entries.
  --out         TSV with `# columns: token\\tweight`, sorted by weight
                descending; `#` header lines carry the positive/negative
                response totals.";

#[derive(Debug, Args)]
#[command(after_long_help = FORMATS)]
pub struct ExtractArgs {
    /// Preference dataset to distill from.
    #[arg(long, value_name = "FILE")]
    data: PathBuf,

    /// Write the discrepancy distribution here.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,

    /// Score against an existing vocabulary instead of building one.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["vocab_out", "min_count"])]
    vocab: Option<PathBuf>,

    /// Also write the vocabulary built from the data.
    #[arg(long, value_name = "FILE")]
    vocab_out: Option<PathBuf>,

    /// Keep only tokens seen at least this often when building the vocabulary.
    #[arg(long, value_name = "N", default_value_t = 1)]
    min_count: usize,

    /// Normalized rank scores at or above this count as positive.
    #[arg(long, value_name = "X", default_value_t = Thresholds::default().tau_pos)]
    tau_pos: f64,

    /// Normalized rank scores at or below this count as negative.
    #[arg(long, value_name = "X", default_value_t = Thresholds::default().tau_neg)]
    tau_neg: f64,
}

pub fn run(args: &ExtractArgs) -> CliResult<()> {
    let data = dataset::read_dataset(&args.data)?;
    let vocabulary = match &args.vocab {
        Some(path) => vocab::read_vocab(path)?,
        None => build_vocab(&data, args.min_count)?,
    };
    let thresholds = Thresholds {
        tau_pos: args.tau_pos,
        tau_neg: args.tau_neg,
    };

    let samples = tokenize_dataset(&data, &vocabulary);
    let q_diff = extract_discrepancy(&samples, vocabulary.size(), &thresholds)?;

    qdiff::write_qdiff(&args.out, &q_diff, &vocabulary)?;
    if let Some(path) = &args.vocab_out {
        vocab::write_vocab(path, &vocabulary)?;
    }
    Ok(())
}
