//! The filter decision file: per-subset summary comments, then tab-separated
//! `id` / `subset` / `R_Q` / `rank` / `selected` rows in dataset order.
//!
//! ```text
//! # subset=helpful  n=200  quota=10
//! # subset=  n=50  quota=3
//! # columns: id  subset  R_Q  rank  selected
//! 17  helpful  -4.0151515151515151e-1  0  1
//! ```

use std::path::Path;

use deft_core::filter::{FilterDecision, SubsetSummary};

use crate::error::CliResult;
use crate::io::{fmt_f64, write_atomic};

/// Write the decisions with their summary block.
pub fn write_decisions(
    path: &Path,
    decisions: &[FilterDecision],
    summaries: &[SubsetSummary],
) -> CliResult<()> {
    let mut out = String::new();
    for s in summaries {
        out.push_str(&format!(
            "# subset={}\tn={}\tquota={}\n",
            s.subset.as_deref().unwrap_or(""),
            s.len,
            s.quota
        ));
    }
    out.push_str("# columns: id\tsubset\tR_Q\trank\tselected\n");
    for d in decisions {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            d.id,
            d.subset.as_deref().unwrap_or(""),
            fmt_f64(d.score),
            d.rank,
            u8::from(d.selected)
        ));
    }
    write_atomic(path, out.as_bytes())
}
