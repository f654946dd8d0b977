//! The distribution-shift report: per-token delta rows (most-shifted first)
//! plus the two bucket histograms as trailing comment tables.
//!
//! ```text
//! # total_a=600  total_b=580
//! # columns: token  count_a  count_b  delta_count  delta_frequency_pp
//! p3  40  9  -31  -5.2873563218390804e0
//! ...
//! # |delta count| buckets  type%  occurrence%
//! # [0, 5)  72.0100  65.4300
//! ...
//! # [200, inf)  0.0000  0.0000
//! # |delta frequency| buckets (pp)  type%  occurrence%
//! ...
//! ```

use std::path::Path;

use deft_core::analysis::{BucketTable, ShiftReport};
use deft_core::corpus::Vocab;

use crate::error::{CliError, CliResult};
use crate::io::{fmt_f64, write_atomic};

fn bucket_lines(out: &mut String, title: &str, table: &BucketTable) {
    out.push_str(&format!("# {title}\ttype%\toccurrence%\n"));
    for (i, &edge) in table.edges.iter().enumerate() {
        let label = match table.edges.get(i + 1) {
            Some(&next) => format!("[{edge}, {next})"),
            None => format!("[{edge}, inf)"),
        };
        out.push_str(&format!(
            "# {label}\t{:.4}\t{:.4}\n",
            table.type_percent[i], table.occurrence_percent[i]
        ));
    }
}

/// Write a shift report, resolving token ids to names.
pub fn write_shift(path: &Path, report: &ShiftReport, vocab: &Vocab) -> CliResult<()> {
    let mut out = format!(
        "# total_a={}\ttotal_b={}\n# columns: token\tcount_a\tcount_b\tdelta_count\tdelta_frequency_pp\n",
        report.total_a, report.total_b
    );
    for t in &report.tokens {
        let token = vocab.token(t.token).ok_or_else(|| {
            CliError::validation(format!(
                "token id {} out of range for vocabulary of size {}",
                t.token,
                vocab.size()
            ))
        })?;
        out.push_str(&format!(
            "{token}\t{}\t{}\t{}\t{}\n",
            t.count_a,
            t.count_b,
            t.delta_count,
            fmt_f64(t.delta_frequency_pp)
        ));
    }
    bucket_lines(&mut out, "|delta count| buckets", &report.count_buckets);
    bucket_lines(
        &mut out,
        "|delta frequency| buckets (pp)",
        &report.frequency_buckets,
    );
    write_atomic(path, out.as_bytes())
}
