//! `deft filter`: keep the lowest-R_Q fraction of each subset.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;

use deft_core::corpus::Dataset;
use deft_core::filter::{select_lowest, ScoredSample};

use crate::error::{CliError, CliResult};
use crate::formats::{dataset, decisions, scores};

const FORMATS: &str = "\
File formats:
  --data       Preference dataset, JSONL (see `deft extract --help`).
  --scores     Score TSV written by `deft score`; must cover exactly the
               samples in --data, with matching subsets.
  --out        JSONL holding only the selected samples, original order.
  --decisions  TSV with `# columns: id\\tsubset\\tR_Q\\trank\\tselected` plus a
               `# subset=...` header per group recording size and quota.";

#[derive(Debug, Args)]
#[command(after_long_help = FORMATS)]
pub struct FilterArgs {
    /// Preference dataset to filter.
    #[arg(long, value_name = "FILE")]
    data: PathBuf,

    /// Score report from `deft score`.
    #[arg(long, value_name = "FILE")]
    scores: PathBuf,

    /// Fraction of each subset to keep, in (0, 1].
    #[arg(long, value_name = "F")]
    fraction: f64,

    /// Write the filtered dataset here.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,

    /// Also write the per-sample decision report.
    #[arg(long, value_name = "FILE")]
    decisions: Option<PathBuf>,

    /// Apply one global quota instead of per-subset quotas.
    #[arg(long)]
    global: bool,
}

pub fn run(args: &FilterArgs) -> CliResult<()> {
    let data = dataset::read_dataset(&args.data)?;
    let score_rows = scores::read_scores(&args.scores)?;

    let mut by_id: BTreeMap<&str, &ScoredSample> = BTreeMap::new();
    for row in &score_rows {
        if by_id.insert(row.id.as_str(), row).is_some() {
            return Err(CliError::validation(format!(
                "{}: duplicate score row for sample {}",
                args.scores.display(),
                row.id
            )));
        }
    }

    let mut scored = Vec::with_capacity(data.len());
    for sample in data.samples() {
        let row = by_id.remove(sample.id.as_str()).ok_or_else(|| {
            CliError::validation(format!(
                "sample {} is missing from {}",
                sample.id,
                args.scores.display()
            ))
        })?;
        if row.subset != sample.subset {
            return Err(CliError::validation(format!(
                "sample {}: subset {:?} in {} does not match the dataset",
                sample.id,
                row.subset.as_deref().unwrap_or(""),
                args.scores.display()
            )));
        }
        scored.push(row.clone());
    }
    if let Some((id, _)) = by_id.pop_first() {
        return Err(CliError::validation(format!(
            "{}: score row for {id} does not match any sample in {}",
            args.scores.display(),
            args.data.display()
        )));
    }

    let (decision_rows, summaries) = select_lowest(&scored, args.fraction, !args.global)?;

    let selected: Vec<_> = data
        .samples()
        .iter()
        .zip(&decision_rows)
        .filter(|(_, d)| d.selected)
        .map(|(s, _)| s.clone())
        .collect();
    let filtered = Dataset::new(selected)?;

    dataset::write_dataset(&args.out, &filtered)?;
    if let Some(path) = &args.decisions {
        decisions::write_decisions(path, &decision_rows, &summaries)?;
    }
    Ok(())
}
