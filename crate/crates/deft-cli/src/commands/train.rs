//! `deft train`: fine-tune the toy model, optionally guided by R_Q.
//!
//! Hyperparameters resolve flag > config file > built-in default, so a config
//! file can hold an experiment's settings while individual flags override
//! single knobs.

use std::path::PathBuf;

use clap::Args;

use deft_core::corpus::tokenize_dataset;
use deft_core::toylm::{ModelInit, ToyAutoregressiveModel};
use deft_core::train::{run_training, TrainConfig};

use crate::error::{CliError, CliResult};
use crate::formats::config::ConfigMap;
use crate::formats::{checkpoint, dataset, metrics, qdiff, vocab};

const FORMATS: &str = "\
File formats:
  --data, --validation  Preference dataset, JSONL (see `deft extract --help`).
  --vocab               Plain text, one token per line; <unk> then <bos> first.
  --qdiff               Discrepancy TSV written by `deft extract`.
  --config              `key = value` lines, `#` comments; keys are the
                        hyperparameter flag names (method, omega, beta,
                        sft-weight, lr, epochs, batch-size, max-steps, seed,
                        rq-in-loss, rq-stop-gradient, response-selector).
                        Unknown keys are rejected; flags override the file.
  --reference,          Binary toy-model checkpoint (magic DEFTCKPT, little-
  --init-checkpoint,    endian header, then vocab-size^2 f64 logits); the
  --out                 round trip is bit-exact.
  --metrics             TSV with `# columns: step\\tepoch\\tloss\\treward\\ttotal\\tlr`
                        plus one `# validation ...` line per epoch when
                        --validation is given.";

#[derive(Debug, Args)]
#[command(after_long_help = FORMATS)]
pub struct TrainArgs {
    /// Training dataset.
    #[arg(long, value_name = "FILE")]
    data: PathBuf,

    /// Vocabulary the model is indexed by.
    #[arg(long, value_name = "FILE")]
    vocab: PathBuf,

    /// Key-value defaults for the hyperparameter flags below.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Training objective.
    #[arg(long, value_enum, value_name = "METHOD")]
    method: Option<super::MethodArg>,

    /// Discrepancy distribution guiding the loss.
    #[arg(long, value_name = "FILE")]
    qdiff: Option<PathBuf>,

    /// Guidance weight on the distribution reward [default: 0.1 with
    /// --qdiff, else 0].
    #[arg(long, value_name = "W")]
    omega: Option<f64>,

    /// DPO inverse temperature.
    #[arg(long, value_name = "B")]
    beta: Option<f64>,

    /// Weight of PRO's auxiliary SFT term.
    #[arg(long, value_name = "W")]
    sft_weight: Option<f64>,

    /// SGD learning rate.
    #[arg(long, value_name = "LR")]
    lr: Option<f64>,

    /// Number of passes over the data.
    #[arg(long, value_name = "N")]
    epochs: Option<usize>,

    /// Samples per optimizer step.
    #[arg(long, value_name = "N")]
    batch_size: Option<usize>,

    /// Hard cap on optimizer steps across all epochs.
    #[arg(long, value_name = "N")]
    max_steps: Option<usize>,

    /// Seed for shuffling and initialization; fully determines the run.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,

    /// Subtract omega * R_Q inside the training objective [default: true
    /// with --qdiff, else false].
    #[arg(long, value_name = "BOOL", num_args = 0..=1, default_missing_value = "true")]
    rq_in_loss: Option<bool>,

    /// Ablation: log the guided loss but block the reward gradient.
    #[arg(long, value_name = "BOOL", num_args = 0..=1, default_missing_value = "true")]
    rq_stop_gradient: Option<bool>,

    /// Which responses feed the averaged log-probabilities for R_Q.
    #[arg(long, value_enum, value_name = "WHICH")]
    response_selector: Option<super::SelectorArg>,

    /// Frozen reference checkpoint; required by --method dpo.
    #[arg(long, value_name = "FILE")]
    reference: Option<PathBuf>,

    /// Fresh-parameter initialization.
    #[arg(
        long,
        value_enum,
        value_name = "HOW",
        conflicts_with = "init_checkpoint"
    )]
    init: Option<super::InitArg>,

    /// Standard deviation for --init gaussian.
    #[arg(long, value_name = "X", conflicts_with = "init_checkpoint")]
    sigma: Option<f64>,

    /// Continue from an existing checkpoint instead of a fresh init.
    #[arg(long, value_name = "FILE")]
    init_checkpoint: Option<PathBuf>,

    /// Held-out dataset scored after every epoch; the best epoch's
    /// parameters are kept.
    #[arg(long, value_name = "FILE")]
    validation: Option<PathBuf>,

    /// Write per-step training metrics here.
    #[arg(long, value_name = "FILE")]
    metrics: Option<PathBuf>,

    /// Write the trained checkpoint here.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

/// Resolve one hyperparameter: flag beats config file beats default.
fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn resolve_config(args: &TrainArgs) -> CliResult<TrainConfig> {
    let mut file = match &args.config {
        Some(path) => ConfigMap::read(path)?,
        None => ConfigMap::default(),
    };
    let base = TrainConfig::default();
    // Guidance is on by default exactly when a distribution is supplied;
    // explicit flags or config keys still override in either direction.
    let guided = args.qdiff.is_some();
    let cfg = TrainConfig {
        method: pick(
            args.method,
            file.take_parsed::<super::MethodArg>("method")?,
            super::MethodArg::Sft,
        )
        .into(),
        omega: pick(
            args.omega,
            file.take_parsed("omega")?,
            if guided { base.omega } else { 0.0 },
        ),
        beta: pick(args.beta, file.take_parsed("beta")?, base.beta),
        sft_weight: pick(
            args.sft_weight,
            file.take_parsed("sft-weight")?,
            base.sft_weight,
        ),
        learning_rate: pick(args.lr, file.take_parsed("lr")?, base.learning_rate),
        epochs: pick(args.epochs, file.take_parsed("epochs")?, base.epochs),
        batch_size: pick(
            args.batch_size,
            file.take_parsed("batch-size")?,
            base.batch_size,
        ),
        max_steps: args.max_steps.or(file.take_parsed("max-steps")?),
        seed: pick(args.seed, file.take_parsed("seed")?, base.seed),
        rq_in_loss: pick(
            args.rq_in_loss,
            file.take_parsed("rq-in-loss")?,
            guided && base.rq_in_loss,
        ),
        rq_stop_gradient: pick(
            args.rq_stop_gradient,
            file.take_parsed("rq-stop-gradient")?,
            base.rq_stop_gradient,
        ),
        response_selector: pick(
            args.response_selector,
            file.take_parsed::<super::SelectorArg>("response-selector")?,
            super::SelectorArg::Chosen,
        )
        .into(),
    };
    file.finish()?;
    Ok(cfg)
}

pub fn run(args: &TrainArgs) -> CliResult<()> {
    let cfg = resolve_config(args)?;
    cfg.validate()?;

    let data = dataset::read_dataset(&args.data)?;
    let vocabulary = vocab::read_vocab(&args.vocab)?;
    let samples = tokenize_dataset(&data, &vocabulary);

    let q_diff = match &args.qdiff {
        Some(path) => Some(qdiff::read_qdiff(path, &vocabulary)?),
        None => None,
    };
    if cfg.rq_in_loss && cfg.omega != 0.0 && q_diff.is_none() {
        return Err(CliError::validation(
            "guided training (omega > 0 with rq-in-loss) requires --qdiff",
        ));
    }

    if cfg.method == deft_core::train::Method::Dpo && args.reference.is_none() {
        return Err(CliError::validation("--method dpo requires --reference"));
    }
    let reference = match &args.reference {
        Some(path) => {
            let reference_model = checkpoint::read_checkpoint(path)?;
            if reference_model.vocab_size() != vocabulary.size() {
                return Err(CliError::validation(format!(
                    "reference checkpoint vocabulary size {} does not match vocabulary size {}",
                    reference_model.vocab_size(),
                    vocabulary.size()
                )));
            }
            Some(reference_model.snapshot())
        }
        None => None,
    };

    let validation_samples = match &args.validation {
        Some(path) => {
            let held_out = dataset::read_dataset(path)?;
            Some(tokenize_dataset(&held_out, &vocabulary))
        }
        None => None,
    };

    let mut model = match &args.init_checkpoint {
        Some(path) => {
            let start = checkpoint::read_checkpoint(path)?;
            if start.vocab_size() != vocabulary.size() {
                return Err(CliError::validation(format!(
                    "initial checkpoint vocabulary size {} does not match vocabulary size {}",
                    start.vocab_size(),
                    vocabulary.size()
                )));
            }
            start
        }
        None => {
            let init = match args.init.unwrap_or(super::InitArg::Zero) {
                super::InitArg::Zero => {
                    if args.sigma.is_some() {
                        return Err(CliError::validation("--sigma requires --init gaussian"));
                    }
                    ModelInit::Zero
                }
                super::InitArg::Gaussian => ModelInit::Gaussian {
                    sigma: args.sigma.unwrap_or(0.1),
                },
            };
            ToyAutoregressiveModel::new(vocabulary.size(), init, cfg.seed)?
        }
    };

    let log = run_training(
        &mut model,
        &samples,
        q_diff.as_ref(),
        reference.as_ref(),
        validation_samples.as_deref(),
        &cfg,
    )?;

    checkpoint::write_checkpoint(&args.out, &model)?;
    if let Some(path) = &args.metrics {
        metrics::write_metrics(path, &log)?;
    }
    Ok(())
}
