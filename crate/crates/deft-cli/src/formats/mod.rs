//! Readers and writers for every artifact file the pipeline exchanges.
//!
//! All text artifacts are UTF-8. Tab-separated files start with `#` comment
//! lines carrying metadata and a `# columns:` line naming the fields;
//! readers skip any `#` line, so the comments can grow without breaking
//! old consumers. Floats are printed with 17 significant digits, which
//! reproduces the exact 64-bit value on parse.

pub mod checkpoint;
pub mod config;
pub mod corpus;
pub mod dataset;
pub mod decisions;
pub mod dump;
pub mod metrics;
pub mod qdiff;
pub mod scores;
pub mod shift;
pub mod sweep;
pub mod truth;
pub mod vocab;

use crate::error::{CliError, CliResult};

/// Split one data row on tabs, enforcing an exact column count.
pub(crate) fn columns<'a, const N: usize>(
    line: &'a str,
    what: &str,
    lineno: usize,
) -> CliResult<[&'a str; N]> {
    let mut out = [""; N];
    let mut parts = line.split('\t');
    for slot in &mut out {
        *slot = parts.next().ok_or_else(|| {
            CliError::validation(format!(
                "{what} line {lineno}: expected {N} tab-separated columns"
            ))
        })?;
    }
    if parts.next().is_some() {
        return Err(CliError::validation(format!(
            "{what} line {lineno}: expected {N} tab-separated columns"
        )));
    }
    Ok(out)
}

/// Parse one typed field from a data row.
pub(crate) fn field<T: core::str::FromStr>(
    raw: &str,
    what: &str,
    name: &str,
    lineno: usize,
) -> CliResult<T> {
    raw.parse().map_err(|_| {
        CliError::validation(format!("{what} line {lineno}: bad {name} value {raw:?}"))
    })
}

/// Iterate the data rows of a tab-separated artifact: skips `#` comments
/// and blank lines, keeps 1-based line numbers for diagnostics.
pub(crate) fn data_rows(content: &str) -> impl Iterator<Item = (usize, &str)> {
    content
        .lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
}
