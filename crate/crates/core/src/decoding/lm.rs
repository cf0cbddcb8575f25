use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::vocab::{Vocabulary, BOS, EOS, SEP, UNK};
use super::DecodeError;
use crate::corpus::CorpusRecord;
use crate::text::tokenize;

/// A next-token model over a fixed vocabulary.
///
/// `next_distribution` returns one probability per vocabulary id, summing to
/// 1. `represent` returns one vector per context position and is only used
/// by contrastive search.
pub trait LanguageModel: Send + Sync {
    fn vocab_size(&self) -> usize;

    fn next_distribution(&self, context: &[u32]) -> Vec<f64>;

    fn represent(&self, context: &[u32]) -> Vec<Vec<f64>>;

    fn represent_last(&self, context: &[u32]) -> Vec<f64> {
        self.represent(context).pop().unwrap_or_default()
    }
}

/// Every token equally likely.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformLM {
    pub vocab_size: usize,
}

impl LanguageModel for UniformLM {
    fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    fn next_distribution(&self, _context: &[u32]) -> Vec<f64> {
        vec![1.0 / self.vocab_size as f64; self.vocab_size]
    }

    fn represent(&self, context: &[u32]) -> Vec<Vec<f64>> {
        vec![Vec::new(); context.len()]
    }
}

/// Mean negative log-probability (nats per token) of `target` after the
/// prompt `BOS source SEP`. Infinite if any target token has probability 0.
pub fn cross_entropy(
    lm: &dyn LanguageModel,
    source: &[u32],
    target: &[u32],
) -> Result<f64, DecodeError> {
    if target.is_empty() {
        return Err(DecodeError::EmptyTarget);
    }
    let mut context = prompt_ids(source);
    let mut total = 0.0;
    for &token in target {
        let p = lm
            .next_distribution(&context)
            .get(token as usize)
            .copied()
            .unwrap_or(0.0);
        if p <= 0.0 {
            return Ok(f64::INFINITY);
        }
        total -= p.ln();
        context.push(token);
    }
    Ok(total / target.len() as f64)
}

/// `BOS source SEP`, the context a simplification is generated from.
pub fn prompt_ids(source: &[u32]) -> Vec<u32> {
    let mut ids = Vec::with_capacity(source.len() + 2);
    ids.push(BOS);
    ids.extend_from_slice(source);
    ids.push(SEP);
    ids
}

/// Token surfaces the language model is trained on; line breaks are `"\n"`.
pub fn lm_surfaces(text: &str) -> Vec<String> {
    tokenize(text).into_iter().map(|t| t.surface).collect()
}

const NO_SPACE_BEFORE: &[&str] = &[",", ".", "!", "?", ":", ";", ")", "]", "}", "\u{201C}", "%"];
const NO_SPACE_AFTER: &[&str] = &["(", "[", "{", "\u{201E}"];

/// Join surfaces into text: single spaces between tokens, none before
/// closing punctuation or after opening brackets, none around line breaks.
pub fn detokenize<S: AsRef<str>>(surfaces: &[S]) -> String {
    let mut out = String::new();
    let mut prev: Option<&str> = None;
    for surface in surfaces {
        let s = surface.as_ref();
        let glue = match prev {
            None | Some("\n") => true,
            Some(p) => s == "\n" || NO_SPACE_BEFORE.contains(&s) || NO_SPACE_AFTER.contains(&p),
        };
        if !glue {
            out.push(' ');
        }
        out.push_str(s);
        prev = Some(s);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// n-gram order, 1..=5.
    pub order: usize,
    /// Absolute discount in [0, 1].
    pub discount: f64,
    /// Surfaces seen fewer times than this become `<unk>`.
    pub min_count: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            order: 3,
            discount: 0.75,
            min_count: 1,
        }
    }
}

pub const MAX_LM_ORDER: usize = 5;
pub const REPRESENTATION_DIM: usize = 32;
const REPRESENTATION_WINDOW: usize = 2;
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ContextCounts {
    total: u64,
    /// (token, count), sorted by token.
    followers: Vec<(u32, u64)>,
}

/// Interpolated absolute-discount n-gram model.
///
/// With history h of length 1..order, discount D, counts c:
/// `P(w|h) = max(c(h,w) - D, 0)/c(h) + D·N(h)/c(h)·P(w|h')`, where N(h) is
/// the number of distinct followers of h and h' drops the oldest token. A
/// history never seen in training falls through to h'. The unigram level
/// interpolates with the uniform distribution the same way.
#[derive(Debug, Clone, PartialEq)]
pub struct NGramLM {
    order: usize,
    discount: f64,
    min_count: usize,
    vocab: Vocabulary,
    unigram: Vec<u64>,
    unigram_total: u64,
    unigram_types: u64,
    contexts: HashMap<Vec<u32>, ContextCounts>,
    representation: Vec<Vec<f64>>,
}

impl NGramLM {
    /// Train on `BOS source SEP target EOS` sequences built from the records.
    pub fn train(records: &[CorpusRecord], config: &TrainConfig) -> Result<Self, DecodeError> {
        if records.is_empty() {
            return Err(DecodeError::EmptyCorpus);
        }
        let texts: Vec<(Vec<String>, Vec<String>)> = records
            .iter()
            .map(|r| (lm_surfaces(&r.source), lm_surfaces(&r.target)))
            .collect();
        let mut frequency: BTreeMap<&str, usize> = BTreeMap::new();
        for (source, target) in &texts {
            for s in source.iter().chain(target) {
                *frequency.entry(s.as_str()).or_default() += 1;
            }
        }
        let mut vocab = Vocabulary::new();
        for (surface, count) in frequency {
            if count >= config.min_count.max(1) {
                vocab.insert(surface);
            }
        }
        let sequences: Vec<Vec<u32>> = texts
            .iter()
            .map(|(source, target)| {
                let mut ids = prompt_ids(&vocab.encode(source));
                ids.extend(vocab.encode(target));
                ids.push(EOS);
                ids
            })
            .collect();
        Self::from_sequences(vocab, &sequences, config)
    }

    /// Train on already-encoded sequences. Each sequence position after the
    /// first is a prediction event.
    pub fn from_sequences(
        vocab: Vocabulary,
        sequences: &[Vec<u32>],
        config: &TrainConfig,
    ) -> Result<Self, DecodeError> {
        if !(1..=MAX_LM_ORDER).contains(&config.order) {
            return Err(DecodeError::InvalidOrder(config.order));
        }
        if !(0.0..=1.0).contains(&config.discount) {
            return Err(DecodeError::Model(format!(
                "discount must be in [0, 1], got {}",
                config.discount
            )));
        }
        if sequences.iter().all(|s| s.len() < 2) {
            return Err(DecodeError::EmptyCorpus);
        }
        let v = vocab.len();
        if let Some(bad) = sequences.iter().flatten().find(|&&id| id as usize >= v) {
            return Err(DecodeError::Model(format!("token id {bad} outside vocabulary of {v}")));
        }

        let mut unigram = vec![0u64; v];
        let mut raw: HashMap<Vec<u32>, BTreeMap<u32, u64>> = HashMap::new();
        let mut representation = vec![vec![0.0; REPRESENTATION_DIM]; v];
        for seq in sequences {
            for i in 1..seq.len() {
                let w = seq[i];
                unigram[w as usize] += 1;
                for h in 1..config.order.min(i + 1) {
                    *raw.entry(seq[i - h..i].to_vec()).or_default().entry(w).or_default() += 1;
                }
            }
            for (i, &w) in seq.iter().enumerate() {
                let lo = i.saturating_sub(REPRESENTATION_WINDOW);
                let hi = (i + REPRESENTATION_WINDOW + 1).min(seq.len());
                for j in (lo..hi).filter(|&j| j != i) {
                    representation[w as usize][bucket(seq[j])] += 1.0 / i.abs_diff(j) as f64;
                }
            }
        }
        for row in &mut representation {
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter_mut().for_each(|x| *x /= norm);
            }
        }
        let contexts = raw
            .into_iter()
            .map(|(history, followers)| {
                let total = followers.values().sum();
                (
                    history,
                    ContextCounts {
                        total,
                        followers: followers.into_iter().collect(),
                    },
                )
            })
            .collect();
        Ok(Self {
            order: config.order,
            discount: config.discount,
            min_count: config.min_count,
            unigram_total: unigram.iter().sum(),
            unigram_types: unigram.iter().filter(|&&c| c > 0).count() as u64,
            unigram,
            vocab,
            contexts,
            representation,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Prompt ids for a source text; unknown surfaces become `<unk>`.
    pub fn encode_prompt(&self, source: &str) -> Vec<u32> {
        prompt_ids(&self.vocab.encode(&lm_surfaces(source)))
    }

    /// Generated ids as text, dropping reserved tokens.
    pub fn decode_text(&self, ids: &[u32]) -> String {
        let surfaces: Vec<&str> = ids
            .iter()
            .filter(|&&id| !Vocabulary::is_reserved(id) || id == UNK)
            .map(|&id| self.vocab.surface(id).unwrap_or("<unk>"))
            .collect();
        detokenize(&surfaces)
    }

    pub fn to_json(&self) -> String {
        let mut contexts: Vec<ContextEntry> = self
            .contexts
            .iter()
            .map(|(history, c)| ContextEntry {
                history: history.clone(),
                total: c.total,
                followers: c.followers.clone(),
            })
            .collect();
        contexts.sort_by(|a, b| a.history.len().cmp(&b.history.len()).then_with(|| a.history.cmp(&b.history)));
        let file = ModelFile {
            format_version: FORMAT_VERSION,
            order: self.order,
            discount: self.discount,
            min_count: self.min_count,
            vocab: self.vocab.clone(),
            unigram: self.unigram.clone(),
            contexts,
            representation: self.representation.clone(),
        };
        serde_json::to_string(&file).expect("model always serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, DecodeError> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| DecodeError::Model(e.to_string()))?;
        if file.format_version != FORMAT_VERSION {
            return Err(DecodeError::Model(format!(
                "unsupported model format version {} (expected {FORMAT_VERSION})",
                file.format_version
            )));
        }
        let v = file.vocab.len();
        if file.unigram.len() != v || file.representation.len() != v {
            return Err(DecodeError::Model("table sizes disagree with the vocabulary".into()));
        }
        Ok(Self {
            order: file.order,
            discount: file.discount,
            min_count: file.min_count,
            unigram_total: file.unigram.iter().sum(),
            unigram_types: file.unigram.iter().filter(|&&c| c > 0).count() as u64,
            unigram: file.unigram,
            vocab: file.vocab,
            contexts: file
                .contexts
                .into_iter()
                .map(|e| {
                    (
                        e.history,
                        ContextCounts {
                            total: e.total,
                            followers: e.followers,
                        },
                    )
                })
                .collect(),
            representation: file.representation,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DecodeError> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|source| DecodeError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DecodeError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| DecodeError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }
}

#[derive(Serialize, Deserialize)]
struct ContextEntry {
    history: Vec<u32>,
    total: u64,
    followers: Vec<(u32, u64)>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    order: usize,
    discount: f64,
    min_count: usize,
    vocab: Vocabulary,
    unigram: Vec<u64>,
    contexts: Vec<ContextEntry>,
    representation: Vec<Vec<f64>>,
}

fn bucket(id: u32) -> usize {
    ((u64::from(id).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 32) % REPRESENTATION_DIM as u64) as usize
}

impl LanguageModel for NGramLM {
    fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    fn next_distribution(&self, context: &[u32]) -> Vec<f64> {
        let v = self.vocab.len();
        let d = self.discount;
        let mut p = vec![1.0 / v as f64; v];
        if self.unigram_total > 0 {
            let n = self.unigram_total as f64;
            let lambda = d * self.unigram_types as f64 / n;
            for (pw, &c) in p.iter_mut().zip(&self.unigram) {
                *pw = (c as f64 - d).max(0.0) / n + lambda * *pw;
            }
        }
        for h in 1..self.order.min(context.len() + 1) {
            let Some(counts) = self.contexts.get(&context[context.len() - h..]) else {
                break;
            };
            let total = counts.total as f64;
            let lambda = d * counts.followers.len() as f64 / total;
            p.iter_mut().for_each(|pw| *pw *= lambda);
            for &(w, c) in &counts.followers {
                p[w as usize] += (c as f64 - d).max(0.0) / total;
            }
        }
        p
    }

    /// Position i is the co-occurrence vector of token i plus half that of
    /// token i - 1.
    fn represent(&self, context: &[u32]) -> Vec<Vec<f64>> {
        let row = |id: u32| self.representation.get(id as usize);
        context
            .iter()
            .enumerate()
            .map(|(i, &id)| {
                let mut vector = row(id).cloned().unwrap_or_else(|| vec![0.0; REPRESENTATION_DIM]);
                if let Some(prev) = i.checked_sub(1).and_then(|j| row(context[j])) {
                    vector.iter_mut().zip(prev).for_each(|(x, y)| *x += 0.5 * y);
                }
                vector
            })
            .collect()
    }

    fn represent_last(&self, context: &[u32]) -> Vec<f64> {
        let n = context.len();
        if n == 0 {
            return Vec::new();
        }
        self.represent(&context[n.saturating_sub(2)..]).pop().unwrap_or_default()
    }
}
