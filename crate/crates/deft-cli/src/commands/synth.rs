//! `deft synth`: seeded synthetic preference data with known ground truth.

use std::path::PathBuf;

use clap::Args;

use deft_core::synth::{generate, SyntheticSpec};

use crate::error::CliResult;
use crate::formats::{dataset, truth};

const FORMATS: &str = "\
File formats:
  --out          Preference dataset, JSONL (see `deft extract --help`).
  --truth        TSV with `# columns: token\\tweight`: the planted preference
                 weight for every preferred/dispreferred token.
  --annotations  TSV with `# columns: id\\tpreference_token_count`: how many
                 planted preference tokens each sample's chosen response
                 carries.";

#[derive(Debug, Args)]
#[command(after_long_help = FORMATS)]
pub struct SynthArgs {
    /// Write the generated dataset here.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,

    /// Number of samples to generate.
    #[arg(long, value_name = "N", default_value_t = SyntheticSpec::default().sample_count)]
    samples: usize,

    /// Size of the neutral shared-token pool.
    #[arg(long, value_name = "N", default_value_t = SyntheticSpec::default().shared_tokens)]
    shared: usize,

    /// Size of the preferred-token pool.
    #[arg(long, value_name = "N", default_value_t = SyntheticSpec::default().positive_tokens)]
    positive: usize,

    /// Size of the dispreferred-token pool.
    #[arg(long, value_name = "N", default_value_t = SyntheticSpec::default().negative_tokens)]
    negative: usize,

    /// Probability that a response token is drawn from its preference pool.
    #[arg(long, value_name = "R", default_value_t = SyntheticSpec::default().mixing_rate)]
    mixing_rate: f64,

    /// Shortest response length, in tokens.
    #[arg(long, value_name = "N", default_value_t = SyntheticSpec::default().response_len_min)]
    len_min: usize,

    /// Longest response length, in tokens.
    #[arg(long, value_name = "N", default_value_t = SyntheticSpec::default().response_len_max)]
    len_max: usize,

    /// Prompt length, in tokens.
    #[arg(long, value_name = "N", default_value_t = SyntheticSpec::default().prompt_len)]
    prompt_len: usize,

    /// Generator seed; fully determines the output.
    #[arg(long, value_name = "SEED", default_value_t = 0)]
    seed: u64,

    /// Also write the planted discrepancy weights.
    #[arg(long, value_name = "FILE")]
    truth: Option<PathBuf>,

    /// Also write per-sample preference-token counts.
    #[arg(long, value_name = "FILE")]
    annotations: Option<PathBuf>,
}

pub fn run(args: &SynthArgs) -> CliResult<()> {
    let spec = SyntheticSpec {
        shared_tokens: args.shared,
        positive_tokens: args.positive,
        negative_tokens: args.negative,
        mixing_rate: args.mixing_rate,
        sample_count: args.samples,
        response_len_min: args.len_min,
        response_len_max: args.len_max,
        prompt_len: args.prompt_len,
        seed: args.seed,
    };
    let (data, ground_truth, annotations) = generate(&spec)?;

    dataset::write_dataset(&args.out, &data)?;
    if let Some(path) = &args.truth {
        truth::write_truth(path, &ground_truth)?;
    }
    if let Some(path) = &args.annotations {
        truth::write_annotations(path, &annotations)?;
    }
    Ok(())
}
