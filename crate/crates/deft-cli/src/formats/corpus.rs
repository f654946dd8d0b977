//! Generation corpora for the shift report: plain UTF-8 text, one
//! generation per line, tokenized with the standard splitter and mapped
//! through the vocabulary (out-of-vocabulary tokens become `<unk>`).

use std::path::Path;

use deft_core::corpus::{tokenize, Vocab};

use crate::error::{CliError, CliResult};
use crate::io::read_input;

/// Read one corpus file as token-id lines; blank lines are skipped.
pub fn read_corpus(path: &Path, vocab: &Vocab) -> CliResult<Vec<Vec<u32>>> {
    let content = read_input(path)?;
    let lines: Vec<Vec<u32>> = content
        .lines()
        .filter(|line| !line.trim().is_empty())
        .map(|line| tokenize(line, vocab))
        .collect();
    if lines.is_empty() {
        return Err(CliError::validation(format!(
            "{}: corpus has no non-empty lines",
            path.display()
        )));
    }
    Ok(lines)
}
