//! `deft sweep`: the full synthetic pipeline over a fraction x seed grid.
//!
//! Every grid point regenerates data, distills, scores, filters, and trains
//! from scratch with the grid seed, then evaluates true alignment on held-out
//! prompts. The default step budget is matched: each fraction gets the same
//! optimizer-step count the reference fraction would use, so rows compare
//! data selection rather than compute.

use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;

use deft_core::distill::Thresholds;
use deft_core::error::Error as CoreError;
use deft_core::pipeline::{run_fraction_sweep, PipelineConfig, SubsetStrategy, SweepBudget};
use deft_core::synth::SyntheticSpec;
use deft_core::train::TrainConfig;

use crate::error::{CliError, CliResult};
use crate::formats::sweep;

const FORMATS: &str = "\
File formats:
  --out  TSV with `# columns: fraction\\tseed\\tquota\\talignment`, one row per
         grid point, followed by one `# median fraction=...` line per
         fraction.";

#[derive(Debug, Args)]
#[command(after_long_help = FORMATS)]
pub struct SweepArgs {
    /// Write the sweep table here.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,

    /// Comma-separated keep-fractions to sweep.
    #[arg(
        long,
        value_name = "FRACTIONS",
        value_delimiter = ',',
        num_args = 1..,
        default_values_t = [0.03, 0.05, 0.1, 0.2, 1.0]
    )]
    fractions: Vec<f64>,

    /// Comma-separated seeds; each fully determines its grid row.
    #[arg(
        long,
        value_name = "SEEDS",
        value_delimiter = ',',
        num_args = 1..,
        default_values_t = [1u64, 2, 3]
    )]
    seeds: Vec<u64>,

    /// Samples per generated dataset.
    #[arg(long, value_name = "N", default_value_t = 20_000)]
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

    /// Epochs of plain SFT before scoring.
    #[arg(long, value_name = "N", default_value_t = 1)]
    sft_epochs: usize,

    /// Learning rate of the pre-scoring SFT stage.
    #[arg(long, value_name = "LR", default_value_t = 0.05)]
    sft_lr: f64,

    /// Preference-training objective.
    #[arg(long, value_enum, value_name = "METHOD", default_value = "sft")]
    method: super::MethodArg,

    /// Guidance weight on the distribution reward.
    #[arg(long, value_name = "W", default_value_t = 0.1)]
    omega: f64,

    /// Preference-training learning rate.
    #[arg(long, value_name = "LR", default_value_t = 0.1)]
    lr: f64,

    /// Preference-training epochs (per grid point, before the budget cap).
    #[arg(long, value_name = "N", default_value_t = 2)]
    epochs: usize,

    /// Samples per optimizer step.
    #[arg(long, value_name = "N", default_value_t = 1)]
    batch_size: usize,

    /// Held-out prompts for the true-alignment evaluation.
    #[arg(long, value_name = "N", default_value_t = 200)]
    eval_prompts: usize,

    /// Reference fraction whose equal-epochs cost sets the matched budget.
    #[arg(long, value_name = "F", default_value_t = 0.05)]
    fraction: f64,

    /// Step budget per grid point: matched, equal-epochs, or a step count.
    #[arg(long, value_name = "BUDGET", default_value = "matched")]
    budget: BudgetArg,
}

/// Parsed `--budget` value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetArg {
    Matched,
    EqualEpochs,
    Steps(usize),
}

impl FromStr for BudgetArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "matched" => Ok(BudgetArg::Matched),
            "equal-epochs" => Ok(BudgetArg::EqualEpochs),
            _ => s
                .parse::<usize>()
                .map(BudgetArg::Steps)
                .map_err(|_| format!("expected matched, equal-epochs, or a step count, got {s:?}")),
        }
    }
}

pub fn run(args: &SweepArgs) -> CliResult<()> {
    if !(args.fraction > 0.0 && args.fraction <= 1.0) {
        return Err(CliError::from(CoreError::InvalidFraction {
            fraction: args.fraction,
        }));
    }

    let cfg = PipelineConfig {
        synth: SyntheticSpec {
            shared_tokens: args.shared,
            positive_tokens: args.positive,
            negative_tokens: args.negative,
            mixing_rate: args.mixing_rate,
            sample_count: args.samples,
            response_len_min: args.len_min,
            response_len_max: args.len_max,
            prompt_len: args.prompt_len,
            seed: 0,
        },
        thresholds: Thresholds::default(),
        min_count: 1,
        sft_epochs: args.sft_epochs,
        sft_learning_rate: args.sft_lr,
        train: TrainConfig {
            method: args.method.into(),
            omega: args.omega,
            learning_rate: args.lr,
            epochs: args.epochs,
            batch_size: args.batch_size,
            ..TrainConfig::default()
        },
        fraction: args.fraction,
        subset_strategy: SubsetStrategy::LowestReward,
        eval_prompts: args.eval_prompts,
    };

    let budget = match args.budget {
        BudgetArg::Matched => {
            SweepBudget::matched(args.samples, args.fraction, args.epochs, args.batch_size)
        }
        BudgetArg::EqualEpochs => SweepBudget::EqualEpochs,
        BudgetArg::Steps(n) => SweepBudget::FixedSteps(n),
    };

    let result = run_fraction_sweep(&cfg, &args.fractions, &args.seeds, budget)?;
    sweep::write_sweep(&args.out, &result)
}
