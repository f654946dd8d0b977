//! The discrepancy-distribution artifact: tab-separated `token` / `weight`
//! rows sorted by descending weight (ties by ascending token id), one row
//! per vocabulary entry, with pool totals in the header:
//!
//! ```text
//! # vocab_size=6  positive_total=12  negative_total=9
//! # columns: token  weight
//! good  2.5000000000000000e-1
//! ...
//! ```
//!
//! Tokens are stored by name, so a distribution stays meaningful even when
//! the vocabulary is rebuilt in a different id order. On read the weights
//! are mapped through the caller's vocabulary: a file token missing from
//! the vocabulary is an error, a vocabulary token missing from the file
//! gets weight 0.

use std::path::Path;

use deft_core::corpus::Vocab;
use deft_core::distill::DiscrepancyDistribution;

use crate::error::{CliError, CliResult};
use crate::formats::{columns, data_rows, field};
use crate::io::{fmt_f64, read_input, write_atomic};

/// Write a discrepancy distribution under a vocabulary.
pub fn write_qdiff(path: &Path, q_diff: &DiscrepancyDistribution, vocab: &Vocab) -> CliResult<()> {
    if vocab.size() != q_diff.vocab_size() {
        return Err(CliError::validation(format!(
            "vocabulary size mismatch: distribution has {}, vocabulary has {}",
            q_diff.vocab_size(),
            vocab.size()
        )));
    }
    let mut rows: Vec<(u32, f64)> = (0..q_diff.vocab_size() as u32)
        .map(|id| (id, q_diff.weight(id)))
        .collect();
    rows.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let mut out = format!(
        "# vocab_size={}\tpositive_total={}\tnegative_total={}\n# columns: token\tweight\n",
        q_diff.vocab_size(),
        q_diff.positive_total(),
        q_diff.negative_total()
    );
    for (id, weight) in rows {
        let token = vocab.token(id).expect("id came from the vocabulary");
        out.push_str(&format!("{token}\t{}\n", fmt_f64(weight)));
    }
    write_atomic(path, out.as_bytes())
}

/// Read a distribution file and remap it onto `vocab`.
pub fn read_qdiff(path: &Path, vocab: &Vocab) -> CliResult<DiscrepancyDistribution> {
    let content = read_input(path)?;
    let what = path.display().to_string();

    let mut positive_total = 0u64;
    let mut negative_total = 0u64;
    for line in content.lines().take_while(|l| l.starts_with('#')) {
        for part in line.trim_start_matches('#').split_whitespace() {
            if let Some(v) = part.strip_prefix("positive_total=") {
                positive_total = v.parse().map_err(|_| {
                    CliError::validation(format!("{what}: bad positive_total {v:?}"))
                })?;
            } else if let Some(v) = part.strip_prefix("negative_total=") {
                negative_total = v.parse().map_err(|_| {
                    CliError::validation(format!("{what}: bad negative_total {v:?}"))
                })?;
            }
        }
    }

    let mut weights = vec![0.0f64; vocab.size()];
    let mut seen = vec![false; vocab.size()];
    for (lineno, line) in data_rows(&content) {
        let [token, raw_weight] = columns(line, &what, lineno)?;
        let id = vocab.id(token).ok_or_else(|| {
            CliError::validation(format!(
                "{what} line {lineno}: token {token:?} is not in the vocabulary"
            ))
        })?;
        if seen[id as usize] {
            return Err(CliError::validation(format!(
                "{what} line {lineno}: duplicate token {token:?}"
            )));
        }
        seen[id as usize] = true;
        weights[id as usize] = field(raw_weight, &what, "weight", lineno)?;
    }
    if !seen.iter().any(|&s| s) {
        return Err(CliError::validation(format!("{what}: no weight rows")));
    }
    DiscrepancyDistribution::from_weights(weights, positive_total, negative_total)
        .map_err(|e| CliError::validation(format!("{what}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> (Vocab, DiscrepancyDistribution) {
        let vocab = Vocab::from_tokens(["a", "b", "c"]).unwrap();
        let q =
            DiscrepancyDistribution::from_weights(vec![0.0, 0.0, 0.25, -0.25, 0.0], 8, 4).unwrap();
        (vocab, q)
    }

    #[test]
    fn round_trips_weights_bitwise_with_totals() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("qdiff.tsv");
        let (vocab, q) = fixture();
        write_qdiff(&path, &q, &vocab).unwrap();
        let again = read_qdiff(&path, &vocab).unwrap();
        for id in 0..vocab.size() as u32 {
            assert_eq!(
                again.weight(id).to_bits(),
                q.weight(id).to_bits(),
                "id {id}"
            );
        }
        assert_eq!(again.positive_total(), 8);
        assert_eq!(again.negative_total(), 4);
    }

    #[test]
    fn rows_are_sorted_by_descending_weight() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("qdiff.tsv");
        let (vocab, q) = fixture();
        write_qdiff(&path, &q, &vocab).unwrap();
        let content = std::fs::read_to_string(&path).unwrap();
        let tokens: Vec<&str> = content
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.split('\t').next().unwrap())
            .collect();
        // +0.25 first, the three zero-weight tokens by id, then -0.25.
        assert_eq!(tokens, vec!["a", "<unk>", "<bos>", "c", "b"]);
    }

    #[test]
    fn unknown_tokens_and_duplicates_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("qdiff.tsv");
        let (vocab, _) = fixture();

        std::fs::write(&path, "# columns: token\tweight\nzz\t1.0\n").unwrap();
        let err = read_qdiff(&path, &vocab).unwrap_err();
        assert!(err.to_string().contains("zz"), "{err}");

        std::fs::write(&path, "a\t0.5\na\t0.5\n").unwrap();
        let err = read_qdiff(&path, &vocab).unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn missing_vocab_tokens_default_to_zero_weight() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("qdiff.tsv");
        let (vocab, _) = fixture();
        std::fs::write(
            &path,
            "# vocab_size=5\tpositive_total=2\tnegative_total=2\na\t5.0e-1\n",
        )
        .unwrap();
        let q = read_qdiff(&path, &vocab).unwrap();
        assert_eq!(q.weight(vocab.id("a").unwrap()), 0.5);
        assert_eq!(q.weight(vocab.id("b").unwrap()), 0.0);
    }
}
