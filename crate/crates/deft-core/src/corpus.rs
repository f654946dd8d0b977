//! Vocabulary, tokenizer, and preference-dataset types.
//!
//! Tokenization is deliberately dumb: split on Unicode whitespace, and treat
//! every ASCII punctuation character as its own single-character token.
//! Out-of-vocabulary tokens map to `<unk>`; `<bos>` is the synthetic
//! start-of-sequence context used by the toy model.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub const UNK_TOKEN: &str = "<unk>";
pub const BOS_TOKEN: &str = "<bos>";

/// Token-string <-> dense-id mapping with two reserved entries:
/// `<unk>` at id 0 and `<bos>` at id 1.
#[derive(Debug, Clone)]
pub struct Vocab {
    tokens: Vec<String>,
    index: BTreeMap<String, u32>,
}

impl Vocab {
    pub const UNK_ID: u32 = 0;
    pub const BOS_ID: u32 = 1;

    /// Build a vocabulary from the non-reserved tokens, in order. Ids are
    /// assigned densely starting at 2. Duplicates and the reserved token
    /// strings are rejected.
    pub fn from_tokens<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Vocab {
            tokens: alloc::vec![UNK_TOKEN.to_string(), BOS_TOKEN.to_string()],
            index: BTreeMap::new(),
        };
        vocab.index.insert(UNK_TOKEN.to_string(), Self::UNK_ID);
        vocab.index.insert(BOS_TOKEN.to_string(), Self::BOS_ID);
        for token in tokens {
            let token = token.into();
            let id = vocab.tokens.len() as u32;
            if vocab.index.insert(token.clone(), id).is_some() {
                return Err(Error::DuplicateToken { token });
            }
            vocab.tokens.push(token);
        }
        Ok(vocab)
    }

    /// Total vocabulary size, reserved tokens included.
    #[must_use]
    pub fn size(&self) -> usize {
        self.tokens.len()
    }

    /// Id for a token, if present (reserved tokens included).
    #[must_use]
    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    /// Id for a token, falling back to `<unk>`.
    #[must_use]
    pub fn id_or_unk(&self, token: &str) -> u32 {
        self.id(token).unwrap_or(Self::UNK_ID)
    }

    /// Token string for an id.
    #[must_use]
    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    /// All token strings in id order (index 0 is `<unk>`, 1 is `<bos>`).
    #[must_use]
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

/// Split text into tokens: whitespace separates, ASCII punctuation becomes
/// single-character tokens. `"don't stop."` -> `don ' t stop .`
#[must_use]
pub fn split_tokens(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    for ch in text.chars() {
        if ch.is_whitespace() {
            if !word.is_empty() {
                tokens.push(core::mem::take(&mut word));
            }
        } else if ch.is_ascii_punctuation() {
            if !word.is_empty() {
                tokens.push(core::mem::take(&mut word));
            }
            tokens.push(ch.to_string());
        } else {
            word.push(ch);
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    tokens
}

/// Tokenize text to ids under a vocabulary; unknown tokens map to `<unk>`.
#[must_use]
pub fn tokenize(text: &str, vocab: &Vocab) -> Vec<u32> {
    split_tokens(text)
        .into_iter()
        .map(|t| vocab.id_or_unk(&t))
        .collect()
}

/// One ranked response: text plus an optional raw preference score.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseText {
    pub text: String,
    pub score: Option<f64>,
}

/// One preference sample: a prompt and `l >= 2` responses ranked best-first.
///
/// Either every response carries a raw score or none does; raw scores must be
/// non-increasing and finite. Unscored samples are ranked by position alone.
#[derive(Debug, Clone)]
pub struct PreferenceSample {
    pub id: String,
    pub prompt: String,
    pub responses: Vec<ResponseText>,
    pub subset: Option<String>,
}

impl PreferenceSample {
    /// Validate and construct. See the type docs for the invariants.
    pub fn new(
        id: String,
        prompt: String,
        responses: Vec<ResponseText>,
        subset: Option<String>,
    ) -> Result<Self> {
        if responses.len() < 2 {
            return Err(Error::RankTooShort {
                id,
                got: responses.len(),
            });
        }
        let scored = responses.iter().filter(|r| r.score.is_some()).count();
        if scored != 0 && scored != responses.len() {
            return Err(Error::PartiallyScored { id });
        }
        if scored != 0 {
            let mut prev = f64::INFINITY;
            for (position, response) in responses.iter().enumerate() {
                let value = response.score.unwrap();
                if !value.is_finite() {
                    return Err(Error::NonFiniteScore { id, value });
                }
                if value > prev {
                    return Err(Error::ScoresNotMonotone { id, position });
                }
                prev = value;
            }
        }
        for (index, response) in responses.iter().enumerate() {
            if split_tokens(&response.text).is_empty() {
                return Err(Error::EmptyResponse { id, index });
            }
        }
        Ok(PreferenceSample {
            id,
            prompt,
            responses,
            subset,
        })
    }

    /// Number of ranked responses (the ranking length `l`).
    #[must_use]
    pub fn rank_length(&self) -> usize {
        self.responses.len()
    }
}

/// A validated collection of preference samples with unique ids.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    samples: Vec<PreferenceSample>,
}

impl Dataset {
    pub fn new(samples: Vec<PreferenceSample>) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for sample in &samples {
            if seen.insert(sample.id.clone(), ()).is_some() {
                return Err(Error::DuplicateSampleId {
                    id: sample.id.clone(),
                });
            }
        }
        Ok(Dataset { samples })
    }

    #[must_use]
    pub fn samples(&self) -> &[PreferenceSample] {
        &self.samples
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Build a vocabulary from every response in the dataset (prompts are not
/// counted): tokens occurring at least `min_count` times, ordered by
/// descending count with ties broken lexicographically.
pub fn build_vocab(dataset: &Dataset, min_count: usize) -> Result<Vocab> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for sample in dataset.samples() {
        for response in &sample.responses {
            for token in split_tokens(&response.text) {
                *counts.entry(token).or_insert(0) += 1;
            }
        }
    }
    let mut kept: Vec<(String, u64)> = counts
        .into_iter()
        .filter(|&(_, n)| n as usize >= min_count.max(1))
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyCorpus { min_count });
    }
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Vocab::from_tokens(kept.into_iter().map(|(t, _)| t))
}

/// A response tokenized to ids, raw score carried along.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenizedResponse {
    pub ids: Vec<u32>,
    pub score: Option<f64>,
}

/// A preference sample after tokenization. This is the seam for plugging in
/// externally tokenized data: anything that can produce these feeds the rest
/// of the pipeline.
#[derive(Debug, Clone)]
pub struct TokenizedSample {
    pub id: String,
    pub subset: Option<String>,
    pub prompt: Vec<u32>,
    pub responses: Vec<TokenizedResponse>,
}

impl TokenizedSample {
    #[must_use]
    pub fn rank_length(&self) -> usize {
        self.responses.len()
    }

    /// Raw scores if present, otherwise the implicit positional ranks
    /// `l-1, l-2, ..., 0` (best response first).
    #[must_use]
    pub fn response_scores(&self) -> Vec<f64> {
        let l = self.responses.len();
        if self.responses.iter().all(|r| r.score.is_some()) {
            self.responses.iter().map(|r| r.score.unwrap()).collect()
        } else {
            (0..l).map(|i| (l - 1 - i) as f64).collect()
        }
    }
}

/// Tokenize a whole dataset under one vocabulary.
pub fn tokenize_dataset(dataset: &Dataset, vocab: &Vocab) -> Vec<TokenizedSample> {
    dataset
        .samples()
        .iter()
        .map(|sample| TokenizedSample {
            id: sample.id.clone(),
            subset: sample.subset.clone(),
            prompt: tokenize(&sample.prompt, vocab),
            responses: sample
                .responses
                .iter()
                .map(|r| TokenizedResponse {
                    ids: tokenize(&r.text, vocab),
                    score: r.score,
                })
                .collect(),
        })
        .collect()
}
