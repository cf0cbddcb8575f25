//! Measurement and generation toolkit for document-level text simplification.
//!
//! * [`text`]: tokenization, segmentation and n-grams shared by everything else
//! * [`metrics`]: BLEU, METEOR and SARI with their sub-scores, plus
//!   distribution summaries over result sets
//! * [`complexity`]: German linguistic-complexity profiles
//! * [`corpus`]: parallel-corpus files, typography cleanup, source synthesis,
//!   split statistics and rating aggregation
//! * [`decoding`]: the language-model interface, a backoff n-gram model and the
//!   greedy, beam, sampling and contrastive decoders

pub mod complexity;
pub mod corpus;
pub mod decoding;
pub mod metrics;
pub mod text;

pub use text::{tokenize, Document, NGramFilter, NGramMultiset, Token, TokenKind, Tokenizer};
