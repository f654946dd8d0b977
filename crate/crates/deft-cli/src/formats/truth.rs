//! Synthetic ground-truth artifacts: the true-discrepancy file
//! (tab-separated `token` / `weight` in generator order) and the per-sample
//! annotation file (`id` / `preference_token_count`).

use std::path::Path;

use deft_core::synth::{SampleAnnotation, TrueDiscrepancy};

use crate::error::{CliError, CliResult};
use crate::formats::{columns, data_rows, field};
use crate::io::{fmt_f64, read_input, write_atomic};

/// Write the generator's exact discrepancy.
pub fn write_truth(path: &Path, truth: &TrueDiscrepancy) -> CliResult<()> {
    let mut out = String::from("# columns: token\tweight\n");
    for (token, weight) in truth.entries() {
        out.push_str(&format!("{token}\t{}\n", fmt_f64(*weight)));
    }
    write_atomic(path, out.as_bytes())
}

/// Read a true-discrepancy file.
pub fn read_truth(path: &Path) -> CliResult<TrueDiscrepancy> {
    let content = read_input(path)?;
    let what = path.display().to_string();
    let mut entries = Vec::new();
    for (lineno, line) in data_rows(&content) {
        let [token, raw_weight] = columns(line, &what, lineno)?;
        entries.push((
            token.to_string(),
            field(raw_weight, &what, "weight", lineno)?,
        ));
    }
    if entries.is_empty() {
        return Err(CliError::validation(format!("{what}: no truth rows")));
    }
    Ok(TrueDiscrepancy::from_entries(entries))
}

/// Write per-sample annotations.
pub fn write_annotations(path: &Path, annotations: &[SampleAnnotation]) -> CliResult<()> {
    let mut out = String::from("# columns: id\tpreference_token_count\n");
    for a in annotations {
        out.push_str(&format!("{}\t{}\n", a.id, a.preference_token_count));
    }
    write_atomic(path, out.as_bytes())
}
