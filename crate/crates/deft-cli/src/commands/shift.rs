//! `deft shift`: token-distribution drift between two corpora.
//!
//! Each side is either a token file or a checkpoint greedy-decoded from a
//! shared prompt file, so the report works for raw data and for before/after
//! model comparisons alike.

use std::path::{Path, PathBuf};

use clap::Args;

use deft_core::analysis::{
    distribution_shift_with_edges, DEFAULT_COUNT_EDGES, DEFAULT_FREQUENCY_EDGES_PP,
};
use deft_core::corpus::{tokenize, Vocab};

use crate::error::{CliError, CliResult};
use crate::formats::{checkpoint, corpus, shift, vocab};
use crate::io::read_input;

const FORMATS: &str = "\
File formats:
  --vocab        Plain text, one token per line; <unk> then <bos> first.
  --corpus-a/-b  Plain text, one sequence per line, whitespace/punctuation
                 tokenized against --vocab (unknown tokens map to <unk>).
  --model-a/-b   Binary toy-model checkpoint written by `deft train`.
  --prompts      Plain text, one prompt per line; each model decodes
                 --decode-len tokens greedily after each prompt.
  --out          TSV with `# columns: token\\tcount_a\\tcount_b\\tdelta_count\\t
                 delta_frequency_pp`, sorted by |delta count| descending,
                 followed by commented |delta count| and |delta frequency|
                 bucket tables (type% and occurrence%).";

#[derive(Debug, Args)]
#[command(after_long_help = FORMATS)]
pub struct ShiftArgs {
    /// Vocabulary both corpora are expressed over.
    #[arg(long, value_name = "FILE")]
    vocab: PathBuf,

    /// Baseline corpus as a token file.
    #[arg(
        long,
        value_name = "FILE",
        required_unless_present = "model_a",
        conflicts_with = "model_a"
    )]
    corpus_a: Option<PathBuf>,

    /// Baseline model checkpoint, decoded over --prompts.
    #[arg(long, value_name = "FILE")]
    model_a: Option<PathBuf>,

    /// Comparison corpus as a token file.
    #[arg(
        long,
        value_name = "FILE",
        required_unless_present = "model_b",
        conflicts_with = "model_b"
    )]
    corpus_b: Option<PathBuf>,

    /// Comparison model checkpoint, decoded over --prompts.
    #[arg(long, value_name = "FILE")]
    model_b: Option<PathBuf>,

    /// Prompt file for model decoding; required with --model-a/--model-b.
    #[arg(long, value_name = "FILE")]
    prompts: Option<PathBuf>,

    /// Tokens to decode per prompt.
    #[arg(long, value_name = "N", default_value_t = 16)]
    decode_len: usize,

    /// Comma-separated |delta count| bucket edges.
    #[arg(long, value_name = "EDGES", value_delimiter = ',', num_args = 1..)]
    count_edges: Option<Vec<f64>>,

    /// Comma-separated |delta frequency| bucket edges, in percentage points.
    #[arg(long, value_name = "EDGES", value_delimiter = ',', num_args = 1..)]
    frequency_edges: Option<Vec<f64>>,

    /// Write the shift report here.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

fn read_prompts(path: &Path, vocabulary: &Vocab) -> CliResult<Vec<Vec<u32>>> {
    let content = read_input(path)?;
    let prompts: Vec<Vec<u32>> = content
        .lines()
        .filter(|line| !line.trim().is_empty())
        .map(|line| tokenize(line, vocabulary))
        .collect();
    if prompts.is_empty() {
        return Err(CliError::validation(format!(
            "{}: no prompts",
            path.display()
        )));
    }
    Ok(prompts)
}

fn resolve_corpus(
    corpus_path: &Option<PathBuf>,
    model_path: &Option<PathBuf>,
    prompts: Option<&[Vec<u32>]>,
    decode_len: usize,
    vocabulary: &Vocab,
) -> CliResult<Vec<Vec<u32>>> {
    if let Some(path) = corpus_path {
        return corpus::read_corpus(path, vocabulary);
    }
    let path = model_path.as_ref().expect("clap requires a corpus source");
    let model = checkpoint::read_checkpoint(path)?;
    if model.vocab_size() != vocabulary.size() {
        return Err(CliError::validation(format!(
            "checkpoint vocabulary size {} does not match vocabulary size {}",
            model.vocab_size(),
            vocabulary.size()
        )));
    }
    let prompts =
        prompts.ok_or_else(|| CliError::validation("--model-a/--model-b require --prompts"))?;
    let mut decoded = Vec::with_capacity(prompts.len());
    for prompt in prompts {
        decoded.push(model.greedy_decode(prompt, decode_len)?);
    }
    Ok(decoded)
}

pub fn run(args: &ShiftArgs) -> CliResult<()> {
    if args.decode_len == 0 {
        return Err(CliError::validation("decode-len must be >= 1"));
    }
    let vocabulary = vocab::read_vocab(&args.vocab)?;
    let prompts = match &args.prompts {
        Some(path) => Some(read_prompts(path, &vocabulary)?),
        None => None,
    };

    let corpus_a = resolve_corpus(
        &args.corpus_a,
        &args.model_a,
        prompts.as_deref(),
        args.decode_len,
        &vocabulary,
    )?;
    let corpus_b = resolve_corpus(
        &args.corpus_b,
        &args.model_b,
        prompts.as_deref(),
        args.decode_len,
        &vocabulary,
    )?;

    let count_edges = args
        .count_edges
        .clone()
        .unwrap_or_else(|| DEFAULT_COUNT_EDGES.to_vec());
    let frequency_edges = args
        .frequency_edges
        .clone()
        .unwrap_or_else(|| DEFAULT_FREQUENCY_EDGES_PP.to_vec());

    let report = distribution_shift_with_edges(
        &corpus_a,
        &corpus_b,
        vocabulary.size(),
        &count_edges,
        &frequency_edges,
    )?;

    shift::write_shift(&args.out, &report, &vocabulary)
}
