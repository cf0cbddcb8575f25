//! Sequence generation: vocabulary, language-model interface, a backoff
//! n-gram model, and the greedy, beam, sampling and contrastive decoders.
//!
//! A simplification is generated from the prompt `BOS source SEP`; the
//! model is trained on `BOS source SEP target EOS`. Every decoder zeroes
//! the reserved tokens and any token that would repeat an n-gram of
//! `no_ngram_repeat_size` in the generated output, and halts before
//! emitting a token that would occur more than `repeat_threshold` times in
//! the trailing `repeat_window` generated tokens. Ties go to the lowest id.

mod config;
mod lm;
mod search;
mod vocab;

use thiserror::Error;

pub use config::{Algorithm, DecodeConfig, FinetuningConfig};
pub use lm::{
    cross_entropy, detokenize, lm_surfaces, prompt_ids, LanguageModel, NGramLM, TrainConfig,
    UniformLM, MAX_LM_ORDER, REPRESENTATION_DIM,
};
pub use search::{
    banned_tokens, beam, check_constraints, contrastive, cosine, decode, draw, exceeds_window,
    filter_distribution, greedy, sample, GenerationResult, HaltReason, Violation,
    GREEDY_TEMPERATURE,
};
pub use vocab::{Vocabulary, BOS, EOS, RESERVED, SEP, UNK};

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("invalid value for `{key}`: {message}")]
    InvalidConfig { key: &'static str, message: String },
    #[error("config syntax: {0}")]
    ConfigSyntax(String),
    #[error("n-gram order must be in 1..={max}, got {0}", max = MAX_LM_ORDER)]
    InvalidOrder(usize),
    #[error("cannot train on an empty corpus")]
    EmptyCorpus,
    #[error("target must not be empty")]
    EmptyTarget,
    #[error("prompt must end with the separator token")]
    PromptWithoutSep,
    #[error("model: {0}")]
    Model(String),
    #[error("failed to access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
