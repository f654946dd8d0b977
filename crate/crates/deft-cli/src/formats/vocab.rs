//! The vocabulary file: one token per line, line number = token id.
//!
//! The first two lines are the reserved `<unk>` and `<bos>` entries; a file
//! missing them was not produced by this toolkit and is rejected rather
//! than silently renumbered.

use std::path::Path;

use deft_core::corpus::{Vocab, BOS_TOKEN, UNK_TOKEN};

use crate::error::{CliError, CliResult};
use crate::io::{read_input, write_atomic};

/// Read and validate a vocabulary file.
pub fn read_vocab(path: &Path) -> CliResult<Vocab> {
    let content = read_input(path)?;
    let mut lines = content.lines();
    for reserved in [UNK_TOKEN, BOS_TOKEN] {
        match lines.next() {
            Some(line) if line == reserved => {}
            got => {
                return Err(CliError::validation(format!(
                    "{}: expected reserved token {reserved:?}, got {:?}",
                    path.display(),
                    got.unwrap_or("end of file")
                )))
            }
        }
    }
    let mut rest = Vec::new();
    for (index, line) in lines.enumerate() {
        if line.is_empty() || line.chars().any(char::is_whitespace) {
            return Err(CliError::validation(format!(
                "{} line {}: tokens must be non-empty and whitespace-free, got {line:?}",
                path.display(),
                index + 3
            )));
        }
        rest.push(line);
    }
    Vocab::from_tokens(rest).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

/// Write a vocabulary file in id order.
pub fn write_vocab(path: &Path, vocab: &Vocab) -> CliResult<()> {
    let mut out = String::new();
    for token in vocab.tokens() {
        out.push_str(token);
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}
