//! The `deft` command line: one subcommand per pipeline stage.

pub mod extract;
pub mod filter;
pub mod score;
pub mod shift;
pub mod sweep;
pub mod synth;
pub mod train;

use clap::{Parser, Subcommand, ValueEnum};

use deft_core::reward::ResponseSelector;
use deft_core::train::Method;

use crate::error::CliResult;

/// Distill a discrepancy distribution from preference data, score and filter
/// samples by distribution reward, and fine-tune a toy model with the reward
/// as a guidance term.
#[derive(Debug, Parser)]
#[command(name = "deft", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Commands,
}

#[derive(Debug, Subcommand)]
pub enum Commands {
    /// Distill a discrepancy distribution from a preference dataset.
    Extract(extract::ExtractArgs),
    /// Score samples with the distribution reward.
    Score(score::ScoreArgs),
    /// Keep the lowest-scoring fraction of each subset.
    Filter(filter::FilterArgs),
    /// Fine-tune the toy model, optionally guided by the reward.
    Train(train::TrainArgs),
    /// Generate a synthetic preference dataset with known ground truth.
    Synth(synth::SynthArgs),
    /// Report the token-distribution shift between two corpora.
    Shift(shift::ShiftArgs),
    /// Sweep the filter fraction over a seed grid, end to end.
    Sweep(sweep::SweepArgs),
}

/// Run one parsed invocation to completion.
pub fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Commands::Extract(args) => extract::run(&args),
        Commands::Score(args) => score::run(&args),
        Commands::Filter(args) => filter::run(&args),
        Commands::Train(args) => train::run(&args),
        Commands::Synth(args) => synth::run(&args),
        Commands::Shift(args) => shift::run(&args),
        Commands::Sweep(args) => sweep::run(&args),
    }
}

/// `--method` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Sft,
    Dpo,
    Pro,
}

impl From<MethodArg> for Method {
    fn from(arg: MethodArg) -> Method {
        match arg {
            MethodArg::Sft => Method::Sft,
            MethodArg::Dpo => Method::Dpo,
            MethodArg::Pro => Method::Pro,
        }
    }
}

impl std::str::FromStr for MethodArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sft" => Ok(MethodArg::Sft),
            "dpo" => Ok(MethodArg::Dpo),
            "pro" => Ok(MethodArg::Pro),
            _ => Err(format!("expected sft, dpo, or pro, got {s:?}")),
        }
    }
}

/// `--response-selector` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SelectorArg {
    /// The top-ranked response only.
    Chosen,
    /// Average over all ranked responses.
    MeanOverAll,
}

impl From<SelectorArg> for ResponseSelector {
    fn from(arg: SelectorArg) -> ResponseSelector {
        match arg {
            SelectorArg::Chosen => ResponseSelector::Chosen,
            SelectorArg::MeanOverAll => ResponseSelector::MeanOverAll,
        }
    }
}

impl std::str::FromStr for SelectorArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "chosen" => Ok(SelectorArg::Chosen),
            "mean-over-all" => Ok(SelectorArg::MeanOverAll),
            _ => Err(format!("expected chosen or mean-over-all, got {s:?}")),
        }
    }
}

/// `--init` values for a fresh model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    /// All-zero logits: the uniform model.
    Zero,
    /// Seeded Gaussian logits (see --sigma).
    Gaussian,
}
