//! The model checkpoint: a little-endian binary file that round-trips the
//! parameter table bit for bit.
//!
//! Layout: 8-byte magic `DEFTCKPT`, format version (u32), vocabulary size
//! (u64), context arity (u32, always 1 for the bigram model), init seed
//! (u64), then the row-major `V x V` logit table as raw f64 bits. Exact
//! length is enforced, so a truncated or padded file never half-loads.

use std::path::Path;

use deft_core::toylm::ToyAutoregressiveModel;

use crate::error::{CliError, CliResult};
use crate::io::{read_input_bytes, write_atomic};

const MAGIC: &[u8; 8] = b"DEFTCKPT";
const VERSION: u32 = 1;
const CONTEXT_ARITY: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 8 + 4 + 8;

/// Write a checkpoint.
pub fn write_checkpoint(path: &Path, model: &ToyAutoregressiveModel) -> CliResult<()> {
    let logits = model.logits();
    let mut bytes = Vec::with_capacity(HEADER_LEN + logits.len() * 8);
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&VERSION.to_le_bytes());
    bytes.extend_from_slice(&(model.vocab_size() as u64).to_le_bytes());
    bytes.extend_from_slice(&CONTEXT_ARITY.to_le_bytes());
    bytes.extend_from_slice(&model.seed().to_le_bytes());
    for &z in logits {
        bytes.extend_from_slice(&z.to_le_bytes());
    }
    write_atomic(path, &bytes)
}

/// Read a checkpoint back into a model.
pub fn read_checkpoint(path: &Path) -> CliResult<ToyAutoregressiveModel> {
    let bytes = read_input_bytes(path)?;
    let what = path.display().to_string();
    let bad = |msg: String| CliError::validation(format!("{what}: {msg}"));

    if bytes.len() < HEADER_LEN {
        return Err(bad(format!(
            "not a checkpoint: {} bytes is shorter than the header",
            bytes.len()
        )));
    }
    if &bytes[..8] != MAGIC {
        return Err(bad("not a checkpoint: bad magic".into()));
    }
    let u32_at = |off: usize| u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
    let u64_at = |off: usize| u64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
    let version = u32_at(8);
    if version != VERSION {
        return Err(bad(format!(
            "unsupported checkpoint version {version}, expected {VERSION}"
        )));
    }
    let vocab_size = u64_at(12) as usize;
    let arity = u32_at(20);
    if arity != CONTEXT_ARITY {
        return Err(bad(format!(
            "unsupported context arity {arity}, expected {CONTEXT_ARITY}"
        )));
    }
    let seed = u64_at(24);

    let expected = HEADER_LEN + vocab_size.saturating_mul(vocab_size).saturating_mul(8);
    if bytes.len() != expected {
        return Err(bad(format!(
            "expected {expected} bytes for vocab size {vocab_size}, got {}",
            bytes.len()
        )));
    }
    let logits: Vec<f64> = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    ToyAutoregressiveModel::from_parts(vocab_size, seed, logits).map_err(|e| bad(e.to_string()))
}
