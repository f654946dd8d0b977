//! File plumbing: contextual reads and atomic writes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process;

use crate::error::{CliError, CliResult};

/// Read a whole input file, blaming the path on failure.
pub fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))
}

/// Read a whole binary input file, blaming the path on failure.
pub fn read_input_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))
}

/// Write an artifact atomically: the content lands under a temporary name
/// in the target directory and is renamed into place, so a crash or a full
/// disk never leaves a half-written file at the destination.
pub fn write_atomic(path: &Path, content: &[u8]) -> CliResult<()> {
    let tmp = sibling_temp_path(path);
    let fail =
        |e: std::io::Error| CliError::internal(format!("cannot write {}: {e}", path.display()));
    fs::write(&tmp, content).map_err(fail)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        fail(e)
    })
}

fn sibling_temp_path(path: &Path) -> PathBuf {
    let mut name = path
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_else(|| ".artifact".into());
    name.push(format!(".tmp.{}", process::id()));
    path.with_file_name(name)
}

/// 17 significant digits: enough to reproduce any f64 bit pattern exactly,
/// so artifact files diff cleanly across runs and machines.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}
