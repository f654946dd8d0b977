//! The training metrics file: one tab-separated row per optimizer step
//! (`step`, `epoch`, `loss`, `reward`, `total`, `lr`), then one trailing
//! comment per epoch-end validation pass. Loads straight into any plotting
//! tool that can skip `#` lines.

use std::path::Path;

use deft_core::train::MetricsLog;

use crate::error::CliResult;
use crate::io::{fmt_f64, write_atomic};

/// Write a metrics log.
pub fn write_metrics(path: &Path, log: &MetricsLog) -> CliResult<()> {
    let mut out = String::from("# columns: step\tepoch\tloss\treward\ttotal\tlr\n");
    for s in &log.steps {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            s.step,
            s.epoch,
            fmt_f64(s.base_loss),
            fmt_f64(s.reward),
            fmt_f64(s.total_loss),
            fmt_f64(s.learning_rate)
        ));
    }
    for v in &log.validation {
        out.push_str(&format!(
            "# validation epoch={}\tmean_total={}\n",
            v.epoch,
            fmt_f64(v.mean_total_loss)
        ));
    }
    write_atomic(path, out.as_bytes())
}
