//! The sweep result file: one tab-separated row per (fraction, seed) grid
//! point, then one trailing comment per fraction with the median metric.

use std::path::Path;

use deft_core::analysis::SweepResult;

use crate::error::CliResult;
use crate::io::{fmt_f64, write_atomic};

/// Write a sweep result.
pub fn write_sweep(path: &Path, result: &SweepResult) -> CliResult<()> {
    let mut out = String::from("# columns: fraction\tseed\tquota\talignment\n");
    for row in &result.rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            fmt_f64(row.fraction),
            row.seed,
            row.quota,
            fmt_f64(row.metric)
        ));
    }
    for &(fraction, median) in &result.medians {
        out.push_str(&format!(
            "# median fraction={}\talignment={}\n",
            fmt_f64(fraction),
            fmt_f64(median)
        ));
    }
    write_atomic(path, out.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use deft_core::analysis::SweepRow;

    #[test]
    fn rows_then_median_comments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.tsv");
        let result = SweepResult {
            rows: vec![
                SweepRow {
                    fraction: 0.05,
                    seed: 1,
                    quota: 100,
                    metric: 0.25,
                },
                SweepRow {
                    fraction: 0.05,
                    seed: 2,
                    quota: 100,
                    metric: 0.5,
                },
            ],
            medians: vec![(0.05, 0.375)],
        };
        write_sweep(&path, &result).unwrap();
        let content = std::fs::read_to_string(&path).unwrap();
        assert!(content.contains("5.0000000000000003e-2\t1\t100\t2.5000000000000000e-1"));
        assert!(content.ends_with(
            "# median fraction=5.0000000000000003e-2\talignment=3.7500000000000000e-1\n"
        ));
    }
}
