//! The dataset file: one JSON object per line.
//!
//! ```text
//! {"id":"42","prompt":"...","responses":[{"text":"best","score":2.0},
//!  {"text":"worst","score":0.0}],"subset":"helpful"}
//! ```
//!
//! `id` and `subset` are optional (a missing id becomes the 0-based line
//! number); responses are ordered best-first; either every response has a
//! `score` or none does. Unknown fields are rejected so typos surface
//! instead of silently dropping data.

use std::path::Path;

use serde::{Deserialize, Serialize};

use deft_core::corpus::{Dataset, PreferenceSample, ResponseText};

use crate::error::{CliError, CliResult};
use crate::io::{read_input, write_atomic};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawResponse {
    text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    score: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSample {
    #[serde(skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    prompt: String,
    responses: Vec<RawResponse>,
    #[serde(skip_serializing_if = "Option::is_none")]
    subset: Option<String>,
}

/// Read and validate a dataset file.
pub fn read_dataset(path: &Path) -> CliResult<Dataset> {
    let content = read_input(path)?;
    let mut samples = Vec::new();
    for (index, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawSample = serde_json::from_str(line).map_err(|e| {
            CliError::validation(format!(
                "{} line {}: invalid record: {e}",
                path.display(),
                index + 1
            ))
        })?;
        let id = raw.id.unwrap_or_else(|| index.to_string());
        let responses = raw
            .responses
            .into_iter()
            .map(|r| ResponseText {
                text: r.text,
                score: r.score,
            })
            .collect();
        let sample = PreferenceSample::new(id, raw.prompt, responses, raw.subset).map_err(|e| {
            CliError::validation(format!("{} line {}: {e}", path.display(), index + 1))
        })?;
        samples.push(sample);
    }
    Dataset::new(samples).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

/// Write a dataset file (ids always explicit so downstream joins are stable).
pub fn write_dataset(path: &Path, dataset: &Dataset) -> CliResult<()> {
    let mut out = String::new();
    for sample in dataset.samples() {
        let raw = RawSample {
            id: Some(sample.id.clone()),
            prompt: sample.prompt.clone(),
            responses: sample
                .responses
                .iter()
                .map(|r| RawResponse {
                    text: r.text.clone(),
                    score: r.score,
                })
                .collect(),
            subset: sample.subset.clone(),
        };
        out.push_str(&serde_json::to_string(&raw).expect("dataset records serialize"));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}
