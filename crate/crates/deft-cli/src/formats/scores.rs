//! The score report: tab-separated `id` / `subset` / `R_Q`, one row per
//! sample in dataset order. An empty subset column means the sample is
//! unpartitioned.

use std::path::Path;

use deft_core::filter::ScoredSample;

use crate::error::{CliError, CliResult};
use crate::formats::{columns, data_rows, field};
use crate::io::{fmt_f64, read_input, write_atomic};

/// Write a score report.
pub fn write_scores(path: &Path, scored: &[ScoredSample]) -> CliResult<()> {
    let mut out = String::from("# columns: id\tsubset\tR_Q\n");
    for s in scored {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            s.id,
            s.subset.as_deref().unwrap_or(""),
            fmt_f64(s.score)
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// Read a score report back.
pub fn read_scores(path: &Path) -> CliResult<Vec<ScoredSample>> {
    let content = read_input(path)?;
    let what = path.display().to_string();
    let mut scored = Vec::new();
    for (lineno, line) in data_rows(&content) {
        let [id, subset, raw_score] = columns(line, &what, lineno)?;
        scored.push(ScoredSample {
            id: id.to_string(),
            subset: (!subset.is_empty()).then(|| subset.to_string()),
            score: field(raw_score, &what, "R_Q", lineno)?,
        });
    }
    if scored.is_empty() {
        return Err(CliError::validation(format!("{what}: no score rows")));
    }
    Ok(scored)
}
