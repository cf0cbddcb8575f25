//! Parallel-corpus files and the operations around them.
//!
//! # Record format
//!
//! A corpus file holds one JSON object per line (JSON Lines, UTF-8):
//!
//! | field         | type    | notes                                              |
//! |---------------|---------|----------------------------------------------------|
//! | `id`          | string  | non-empty, unique within the file                  |
//! | `source`      | string  | everyday-language text; may be empty before synthesis |
//! | `target`      | string  | simplification; non-empty unless explicitly allowed |
//! | `provenance`  | string  | origin, e.g. the site a text was collected from    |
//! | `split`       | string  | `"train"` or `"test"`                              |
//! | `template_id` | integer | optional; prompt template used to synthesize `source` |
//!
//! Multi-paragraph texts are stored with standard JSON string escaping, so a
//! newline inside a text is written as `\n` and a record never spans lines.
//! Unknown fields are rejected. Blank lines and lines whose first
//! non-whitespace character is `#` are skipped.
//!
//! [`save`] writes fields in the order above with compact separators, so
//! loading a saved file and saving it again reproduces it byte for byte.

mod ratings;
mod stats;
mod synthesis;
mod typography;

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub use ratings::{aggregate_ratings, parse_ratings, HumanRating, RatingSummary, MAX_RATING};
pub use stats::{split_stats, thousands, SplitCounts, SplitRow, SplitStats};
pub use synthesis::{
    builtin_templates, parse_templates, synthesize_sources, templates_from_file, PrefixStub,
    PromptTemplate, SynthesisFailure, SynthesisOptions, SynthesisOutput, SynthesisProvider,
    TEMPLATE_SLOT,
};
pub use typography::standardize_typography;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    pub source: String,
    pub target: String,
    pub provenance: String,
    pub split: Split,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template_id: Option<u32>,
}

/// A problem with one or more lines of an input file. Line numbers are
/// 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub lines: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.lines.iter().map(usize::to_string).collect();
        let noun = if self.lines.len() == 1 { "line" } else { "lines" };
        write!(f, "{noun} {}", lines.join(", "))?;
        if let Some(field) = &self.field {
            write!(f, ", field `{field}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{} invalid entr{} in {origin}; first: {}", .diagnostics.len(),
        if .diagnostics.len() == 1 { "y" } else { "ies" }, .diagnostics[0])]
    Invalid {
        origin: String,
        diagnostics: Vec<Diagnostic>,
    },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("test size {requested} exceeds corpus size {available}")]
    TestSizeTooLarge { requested: usize, available: usize },
    #[error("no prompt templates given")]
    NoTemplates,
    #[error("template line {line}: {message}")]
    Template { line: usize, message: String },
    #[error("all {} synthesis calls failed", .failures.len())]
    AllSynthesisFailed { failures: Vec<SynthesisFailure> },
    #[error("no ratings given")]
    EmptyRatings,
    #[error("rating {value} outside 0..={max}", max = MAX_RATING)]
    RatingOutOfRange { value: i64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Accept records whose target is empty.
    pub allow_empty_target: bool,
}

pub fn load(path: impl AsRef<Path>) -> Result<Vec<CorpusRecord>, CorpusError> {
    load_with(path, LoadOptions::default())
}

pub fn load_with(
    path: impl AsRef<Path>,
    options: LoadOptions,
) -> Result<Vec<CorpusRecord>, CorpusError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let records = parse_records(&text, options).map_err(|e| match e {
        CorpusError::Invalid { diagnostics, .. } => CorpusError::Invalid {
            origin: path.display().to_string(),
            diagnostics,
        },
        other => other,
    })?;
    if records.is_empty() {
        log::warn!("{}: corpus file holds no records", path.display());
    }
    Ok(records)
}

const FIELDS: [&str; 6] = ["id", "source", "target", "provenance", "split", "template_id"];

/// Parse JSON Lines text, collecting every problem before failing.
pub fn parse_records(text: &str, options: LoadOptions) -> Result<Vec<CorpusRecord>, CorpusError> {
    let mut records = Vec::new();
    let mut diagnostics = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match parse_record(trimmed, options) {
            Ok(record) => {
                if let Some(&first) = seen.get(&record.id) {
                    diagnostics.push(Diagnostic {
                        lines: vec![first, line_no],
                        field: Some("id".into()),
                        message: format!("duplicate id {:?}", record.id),
                    });
                } else {
                    seen.insert(record.id.clone(), line_no);
                    records.push(record);
                }
            }
            Err(problems) => diagnostics.extend(problems.into_iter().map(|(field, message)| {
                Diagnostic {
                    lines: vec![line_no],
                    field,
                    message,
                }
            })),
        }
    }
    if diagnostics.is_empty() {
        Ok(records)
    } else {
        Err(CorpusError::Invalid {
            origin: "input".into(),
            diagnostics,
        })
    }
}

type Problem = (Option<String>, String);

fn parse_record(line: &str, options: LoadOptions) -> Result<CorpusRecord, Vec<Problem>> {
    let value: Value = serde_json::from_str(line)
        .map_err(|e| vec![(None, format!("malformed JSON: {e}"))])?;
    let Value::Object(map) = value else {
        return Err(vec![(None, "expected a JSON object".into())]);
    };
    let mut problems: Vec<Problem> = map
        .keys()
        .filter(|k| !FIELDS.contains(&k.as_str()))
        .map(|k| (Some(k.clone()), "unknown field".into()))
        .collect();
    let mut text_field = |name: &str| -> Option<String> {
        match map.get(name) {
            None => {
                problems.push((Some(name.into()), "missing field".into()));
                None
            }
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => {
                problems.push((Some(name.into()), "expected a string".into()));
                None
            }
        }
    };
    let id = text_field("id");
    let source = text_field("source");
    let target = text_field("target");
    let provenance = text_field("provenance");
    let split = text_field("split");
    let split = split.and_then(|s| match s.as_str() {
        "train" => Some(Split::Train),
        "test" => Some(Split::Test),
        other => {
            problems.push((
                Some("split".into()),
                format!("invalid split {other:?}, expected \"train\" or \"test\""),
            ));
            None
        }
    });
    let template_id = match map.get("template_id") {
        None => None,
        Some(v) => match v.as_u64().and_then(|n| u32::try_from(n).ok()) {
            Some(n) => Some(n),
            None => {
                problems.push((
                    Some("template_id".into()),
                    "expected a non-negative integer".into(),
                ));
                None
            }
        },
    };
    if id.as_deref() == Some("") {
        problems.push((Some("id".into()), "empty id".into()));
    }
    if !options.allow_empty_target && target.as_deref().is_some_and(|t| t.trim().is_empty()) {
        problems.push((Some("target".into()), "empty target".into()));
    }
    match (id, source, target, provenance, split) {
        (Some(id), Some(source), Some(target), Some(provenance), Some(split))
            if problems.is_empty() =>
        {
            Ok(CorpusRecord {
                id,
                source,
                target,
                provenance,
                split,
                template_id,
            })
        }
        _ => Err(problems),
    }
}

pub fn to_jsonl(records: &[CorpusRecord]) -> String {
    let mut out = String::new();
    for record in records {
        out.push_str(&serde_json::to_string(record).expect("records always serialize"));
        out.push('\n');
    }
    out
}

pub fn save(path: impl AsRef<Path>, records: &[CorpusRecord]) -> Result<(), CorpusError> {
    let path = path.as_ref();
    fs::write(path, to_jsonl(records)).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Mark exactly `test_size` records as test, chosen uniformly with a seeded
/// generator; all others become train.
pub fn assign_splits(
    records: &mut [CorpusRecord],
    test_size: usize,
    seed: u64,
) -> Result<(), CorpusError> {
    if test_size > records.len() {
        return Err(CorpusError::TestSizeTooLarge {
            requested: test_size,
            available: records.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut is_test = vec![false; records.len()];
    for i in sample(&mut rng, records.len(), test_size) {
        is_test[i] = true;
    }
    for (record, test) in records.iter_mut().zip(is_test) {
        record.split = if test { Split::Test } else { Split::Train };
    }
    Ok(())
}
