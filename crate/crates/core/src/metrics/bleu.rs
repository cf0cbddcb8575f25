use serde::{Deserialize, Serialize};

use super::{metric_units, MetricError, MAX_ORDER};
use crate::text::{count_windows, Document};

/// Sentence-style BLEU over a whole document, single reference, no smoothing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuReport {
    pub score: f64,
    /// Clipped n-gram precisions p_1..p_4.
    pub precisions: [f64; MAX_ORDER],
    /// Clipped match counts behind each precision.
    pub matches: [usize; MAX_ORDER],
    /// Prediction n-gram totals behind each precision.
    pub totals: [usize; MAX_ORDER],
    pub brevity_penalty: f64,
    pub prediction_length: usize,
    pub reference_length: usize,
}

pub fn bleu(prediction: &Document, reference: &Document) -> Result<BleuReport, MetricError> {
    bleu_units(&metric_units(prediction), &metric_units(reference))
}

pub fn bleu_units(prediction: &[String], reference: &[String]) -> Result<BleuReport, MetricError> {
    if reference.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    let mut precisions = [0.0; MAX_ORDER];
    let mut matches = [0; MAX_ORDER];
    let mut totals = [0; MAX_ORDER];
    for n in 1..=MAX_ORDER {
        let pred = count_windows(prediction, n);
        let refs = count_windows(reference, n);
        let clipped: usize = pred
            .counts
            .iter()
            .map(|(gram, &c)| c.min(refs.count(gram)))
            .sum();
        let total = pred.total();
        matches[n - 1] = clipped;
        totals[n - 1] = total;
        precisions[n - 1] = if total == 0 {
            0.0
        } else {
            clipped as f64 / total as f64
        };
    }

    let c = prediction.len();
    let r = reference.len();
    // exp(1 - r/0) -> 0 in the limit; an empty prediction scores 0 regardless.
    let brevity_penalty = if c > r {
        1.0
    } else if c == 0 {
        0.0
    } else {
        (1.0 - r as f64 / c as f64).exp()
    };

    let score = if precisions.iter().any(|&p| p == 0.0) {
        0.0
    } else {
        let product: f64 = precisions.iter().product();
        100.0 * brevity_penalty * product.powf(1.0 / MAX_ORDER as f64)
    };

    Ok(BleuReport {
        score,
        precisions,
        matches,
        totals,
        brevity_penalty,
        prediction_length: c,
        reference_length: r,
    })
}
