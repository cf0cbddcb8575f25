//! Rule-based evaluation metrics with full sub-score decomposition.
//!
//! All three metrics see a document as one sequence of lowercased tokens with
//! line breaks removed (punctuation and bullets stay). Scores use the usual
//! scales: BLEU and SARI in `[0, 100]`, METEOR in `[0, 1]`.

mod bleu;
mod distribution;
mod meteor;
mod sari;

use thiserror::Error;

use crate::text::{Document, TokenKind};

pub use bleu::{bleu, bleu_units, BleuReport};
pub use distribution::{
    precision_distribution, sari_component_distribution, sari_delete_distribution, summarize,
    ComponentSummary, DistributionSummary, SariComponent,
};
pub use meteor::{align, meteor, meteor_units, Alignment, MeteorReport, DEFAULT_SEARCH_BUDGET};
pub use sari::{sari, sari_profiles, EmptySets, NgramIndex, NgramProfile, SariNgramScores, SariReport};

/// Highest n-gram order used by BLEU and SARI.
pub const MAX_ORDER: usize = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("reference is empty")]
    EmptyReference,
    #[error("source is empty; SARI operations are undefined")]
    EmptySource,
    #[error("cannot summarize an empty result set")]
    EmptyResultSet,
}

/// Lowercased surfaces of every non-LineBreak token.
pub fn metric_units(doc: &Document) -> Vec<String> {
    doc.tokens
        .iter()
        .filter(|t| t.kind != TokenKind::LineBreak)
        .map(|t| t.surface.to_lowercase())
        .collect()
}

/// Arithmetic mean, `None` for an empty slice.
pub fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}
