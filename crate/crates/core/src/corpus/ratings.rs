use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{CorpusError, Diagnostic};
use crate::complexity::MeanStd;

pub const MAX_RATING: u8 = 3;

/// Agreement between a prediction and its reference on a 0..=3 scale.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRating")]
pub struct HumanRating {
    pub record_id: String,
    rating: u8,
}

#[derive(Deserialize)]
struct RawRating {
    record_id: String,
    rating: i64,
}

impl TryFrom<RawRating> for HumanRating {
    type Error = CorpusError;

    fn try_from(raw: RawRating) -> Result<Self, Self::Error> {
        Self::new(raw.record_id, raw.rating)
    }
}

impl HumanRating {
    pub fn new(record_id: impl Into<String>, rating: i64) -> Result<Self, CorpusError> {
        match u8::try_from(rating) {
            Ok(r) if r <= MAX_RATING => Ok(Self {
                record_id: record_id.into(),
                rating: r,
            }),
            _ => Err(CorpusError::RatingOutOfRange { value: rating }),
        }
    }

    pub fn rating(&self) -> u8 {
        self.rating
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatingSummary {
    pub count: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

pub fn aggregate_ratings(ratings: &[HumanRating]) -> Result<RatingSummary, CorpusError> {
    let values: Vec<f64> = ratings.iter().map(|r| f64::from(r.rating)).collect();
    let MeanStd { mean, std } = MeanStd::of(&values).ok_or(CorpusError::EmptyRatings)?;
    Ok(RatingSummary {
        count: ratings.len(),
        mean,
        std,
    })
}

/// JSON Lines of `{"record_id": ..., "rating": 0..=3}`; blank and `#` lines
/// are skipped. Every invalid line is reported.
pub fn parse_ratings(text: &str) -> Result<Vec<HumanRating>, CorpusError> {
    let mut ratings = Vec::new();
    let mut diagnostics = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let diagnostic = |field: Option<&str>, message: String| Diagnostic {
            lines: vec![idx + 1],
            field: field.map(str::to_string),
            message,
        };
        let value: Value = match serde_json::from_str(trimmed) {
            Ok(v) => v,
            Err(e) => {
                diagnostics.push(diagnostic(None, format!("malformed JSON: {e}")));
                continue;
            }
        };
        let id = value.get("record_id").and_then(Value::as_str);
        let rating = value.get("rating").and_then(Value::as_i64);
        match (id, rating) {
            (None, _) => diagnostics.push(diagnostic(Some("record_id"), "missing or not a string".into())),
            (_, None) => diagnostics.push(diagnostic(Some("rating"), "missing or not an integer".into())),
            (Some(id), Some(r)) => match HumanRating::new(id, r) {
                Ok(rating) => ratings.push(rating),
                Err(e) => diagnostics.push(diagnostic(Some("rating"), e.to_string())),
            },
        }
    }
    if diagnostics.is_empty() {
        Ok(ratings)
    } else {
        Err(CorpusError::Invalid {
            origin: "ratings".into(),
            diagnostics,
        })
    }
}
