//! The log-probability dump: one JSON record per sample carrying averaged
//! per-token log-probabilities, for scoring data against a model that lives
//! outside this toolkit.
//!
//! Each record is either dense or sparse:
//!
//! ```text
//! {"id":"7","avg_logprobs":[-1.25,-2.5,...]}        // all V values
//! {"id":"8","sparse":[[2,-1.25],[5,-0.5]]}          // (token id, value) pairs
//! ```
//!
//! A record must use exactly one of the two encodings. Sparse records only
//! need to cover the discrepancy support the scorer will consult.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::io::{read_input, write_atomic};

/// One sample's averaged log-probabilities.
#[derive(Debug, Clone, PartialEq)]
pub enum DumpValues {
    Dense(Vec<f64>),
    Sparse(Vec<(u32, f64)>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    avg_logprobs: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sparse: Option<Vec<(u32, f64)>>,
}

/// Read a dump into an id-keyed map.
pub fn read_dump(path: &Path) -> CliResult<BTreeMap<String, DumpValues>> {
    let content = read_input(path)?;
    let what = path.display().to_string();
    let mut records = BTreeMap::new();
    for (index, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = index + 1;
        let raw: RawRecord = serde_json::from_str(line).map_err(|e| {
            CliError::validation(format!("{what} line {lineno}: invalid record: {e}"))
        })?;
        let values = match (raw.avg_logprobs, raw.sparse) {
            (Some(dense), None) => DumpValues::Dense(dense),
            (None, Some(sparse)) => DumpValues::Sparse(sparse),
            _ => {
                return Err(CliError::validation(format!(
                    "{what} line {lineno}: record needs exactly one of avg_logprobs or sparse"
                )))
            }
        };
        if records.insert(raw.id.clone(), values).is_some() {
            return Err(CliError::validation(format!(
                "{what} line {lineno}: duplicate id {:?}",
                raw.id
            )));
        }
    }
    if records.is_empty() {
        return Err(CliError::validation(format!("{what}: no records")));
    }
    Ok(records)
}

/// Write a dense dump in the given id order.
pub fn write_dump(path: &Path, records: &[(String, Vec<f64>)]) -> CliResult<()> {
    let mut out = String::new();
    for (id, values) in records {
        let raw = RawRecord {
            id: id.clone(),
            avg_logprobs: Some(values.clone()),
            sparse: None,
        };
        out.push_str(&serde_json::to_string(&raw).expect("dump records serialize"));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}
