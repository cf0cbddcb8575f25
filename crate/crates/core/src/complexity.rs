//! Linguistic-complexity profiles for German text.
//!
//! Four per-document measures are averaged over a document set and reported
//! as mean ± population standard deviation:
//!
//! * average sentence length in words (Word and Number tokens),
//! * average number of commas per sentence,
//! * average normalized distance between a finite verb and its separated
//!   particle ("kommt ... an"),
//! * average words per non-empty line.
//!
//! # Verb-compound distance, rule version 1
//!
//! Each sentence is cut into clauses at commas and semicolons. A clause
//! contributes a pair when its last word is a lexicon particle written in
//! lowercase and some earlier word of the clause is a finite form of a stem
//! paired with that particle. Candidate verbs are tried in the order of
//! clause word positions 1, 0, 2, 3, ... (verb-second first), and the first
//! match wins. A form is finite for a stem when it equals the stem followed by
//! one of [`FINITE_ENDINGS`], compared in lowercase.
//!
//! The sentence value is the number of words strictly between verb and
//! particle, summed over the sentence's pairs and divided by the sentence's
//! word count. Sentences without a pair contribute 0; the document value is
//! the mean over sentences.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{Document, Token, TokenKind};

/// Version of the verb-compound distance rule described in the module docs.
pub const VERB_DISTANCE_RULE_VERSION: u32 = 1;

/// Person and tense endings accepted after a verb stem.
pub const FINITE_ENDINGS: &[&str] = &["", "e", "st", "t", "et", "est", "en", "te", "ten", "test", "tet"];

const BUILTIN_LEXICON: &str = include_str!("../data/separable_verbs.txt");

#[derive(Debug, Error)]
pub enum ComplexityError {
    #[error("document has no sentences")]
    NoSentences,
    #[error("document has no non-empty lines")]
    NoLines,
    #[error("cannot profile an empty document set")]
    EmptySet,
    #[error("document {index}: {source}")]
    Document {
        index: usize,
        #[source]
        source: Box<ComplexityError>,
    },
    #[error("lexicon line {line}: {message}")]
    LexiconSyntax { line: usize, message: String },
    #[error("lexicon is empty")]
    EmptyLexicon,
    #[error("failed to read lexicon {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Separable-verb pairs, keyed by particle. Particles are lowercase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparableVerbLexicon {
    stems: BTreeMap<String, BTreeSet<String>>,
}

impl Default for SeparableVerbLexicon {
    fn default() -> Self {
        Self::parse(BUILTIN_LEXICON).expect("built-in lexicon is well formed")
    }
}

impl SeparableVerbLexicon {
    pub fn from_pairs<P, S>(pairs: impl IntoIterator<Item = (P, S)>) -> Result<Self, ComplexityError>
    where
        P: AsRef<str>,
        S: AsRef<str>,
    {
        let mut stems: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (particle, stem) in pairs {
            stems
                .entry(particle.as_ref().to_lowercase())
                .or_default()
                .insert(stem.as_ref().to_lowercase());
        }
        if stems.is_empty() {
            return Err(ComplexityError::EmptyLexicon);
        }
        Ok(Self { stems })
    }

    /// One "particle stem" pair per line; blank lines and `#` comments are
    /// ignored.
    pub fn parse(text: &str) -> Result<Self, ComplexityError> {
        let mut pairs = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                [particle, stem] => pairs.push((particle.to_string(), stem.to_string())),
                _ => {
                    return Err(ComplexityError::LexiconSyntax {
                        line: idx + 1,
                        message: format!("expected \"particle stem\", got {line:?}"),
                    })
                }
            }
        }
        Self::from_pairs(pairs)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ComplexityError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ComplexityError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn particles(&self) -> impl Iterator<Item = &str> {
        self.stems.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.stems.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.stems.is_empty()
    }

    pub fn is_particle(&self, word: &str) -> bool {
        self.stems.contains_key(word)
    }

    /// Whether `verb` is a finite form of a stem paired with `particle`.
    pub fn matches(&self, particle: &str, verb: &str) -> bool {
        let Some(stems) = self.stems.get(particle) else {
            return false;
        };
        let verb = verb.to_lowercase();
        stems.iter().any(|stem| {
            verb.strip_prefix(stem.as_str())
                .is_some_and(|ending| FINITE_ENDINGS.contains(&ending))
        })
    }
}

pub fn sentence_length(doc: &Document) -> Result<f64, ComplexityError> {
    per_sentence_mean(doc, |tokens| {
        tokens.iter().filter(|t| t.kind.is_word()).count() as f64
    })
}

pub fn commas_per_sentence(doc: &Document) -> Result<f64, ComplexityError> {
    per_sentence_mean(doc, |tokens| {
        tokens.iter().filter(|t| t.kind == TokenKind::Comma).count() as f64
    })
}

pub fn verb_compound_distance(
    doc: &Document,
    lexicon: &SeparableVerbLexicon,
) -> Result<f64, ComplexityError> {
    per_sentence_mean(doc, |tokens| sentence_verb_distance(tokens, lexicon))
}

/// Mean word count over lines holding at least one non-LineBreak token.
pub fn words_per_line(doc: &Document) -> Result<f64, ComplexityError> {
    let counts: Vec<f64> = (0..doc.lines.len())
        .map(|i| doc.line_tokens(i))
        .filter(|line| line.iter().any(|t| t.kind != TokenKind::LineBreak))
        .map(|line| line.iter().filter(|t| t.kind.is_word()).count() as f64)
        .collect();
    if counts.is_empty() {
        return Err(ComplexityError::NoLines);
    }
    Ok(counts.iter().sum::<f64>() / counts.len() as f64)
}

fn per_sentence_mean(
    doc: &Document,
    value: impl Fn(&[&Token]) -> f64,
) -> Result<f64, ComplexityError> {
    if doc.sentences.is_empty() {
        return Err(ComplexityError::NoSentences);
    }
    let total: f64 = (0..doc.sentences.len())
        .map(|i| value(&doc.sentence_tokens(i).collect::<Vec<_>>()))
        .sum();
    Ok(total / doc.sentences.len() as f64)
}

fn sentence_verb_distance(tokens: &[&Token], lexicon: &SeparableVerbLexicon) -> f64 {
    let words = tokens.iter().filter(|t| t.kind.is_word()).count();
    if words == 0 {
        return 0.0;
    }
    let between: usize = tokens
        .split(|t| t.kind == TokenKind::Comma || t.surface == ";")
        .filter_map(|clause| clause_distance(clause, lexicon))
        .sum();
    between as f64 / words as f64
}

fn clause_distance(clause: &[&Token], lexicon: &SeparableVerbLexicon) -> Option<usize> {
    let words: Vec<&Token> = clause.iter().copied().filter(|t| t.kind.is_word()).collect();
    let (particle, rest) = words.split_last()?;
    if particle.kind != TokenKind::Word
        || particle.surface.chars().any(char::is_uppercase)
        || !lexicon.is_particle(&particle.surface)
    {
        return None;
    }
    let last = rest.len();
    let order = [1, 0].into_iter().chain(2..last).filter(|&i| i < last);
    order
        .into_iter()
        .find(|&i| rest[i].kind == TokenKind::Word && lexicon.matches(&particle.surface, &rest[i].surface))
        .map(|i| last - i - 1)
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some(Self {
            mean,
            std: var.sqrt(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityProfile {
    pub documents: usize,
    pub avg_sentence_length: MeanStd,
    pub commas_per_sentence: MeanStd,
    pub verb_compound_distance: MeanStd,
    pub words_per_line: MeanStd,
    pub verb_distance_rule: u32,
}

/// Per-document values of the four measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DocumentComplexity {
    pub sentence_length: f64,
    pub commas_per_sentence: f64,
    pub verb_compound_distance: f64,
    pub words_per_line: f64,
}

pub fn document_complexity(
    doc: &Document,
    lexicon: &SeparableVerbLexicon,
) -> Result<DocumentComplexity, ComplexityError> {
    Ok(DocumentComplexity {
        sentence_length: sentence_length(doc)?,
        commas_per_sentence: commas_per_sentence(doc)?,
        verb_compound_distance: verb_compound_distance(doc, lexicon)?,
        words_per_line: words_per_line(doc)?,
    })
}

pub fn profile(
    docs: &[Document],
    lexicon: &SeparableVerbLexicon,
) -> Result<ComplexityProfile, ComplexityError> {
    if docs.is_empty() {
        return Err(ComplexityError::EmptySet);
    }
    let values = docs
        .iter()
        .enumerate()
        .map(|(index, doc)| {
            document_complexity(doc, lexicon).map_err(|e| ComplexityError::Document {
                index,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let stat = |f: fn(&DocumentComplexity) -> f64| {
        MeanStd::of(&values.iter().map(f).collect::<Vec<_>>()).expect("non-empty")
    };
    Ok(ComplexityProfile {
        documents: docs.len(),
        avg_sentence_length: stat(|d| d.sentence_length),
        commas_per_sentence: stat(|d| d.commas_per_sentence),
        verb_compound_distance: stat(|d| d.verb_compound_distance),
        words_per_line: stat(|d| d.words_per_line),
        verb_distance_rule: VERB_DISTANCE_RULE_VERSION,
    })
}

const ROW_LABELS: [&str; 4] = [
    "avg. sentence length",
    "avg. commas per sentence",
    "avg. distance verb compounds",
    "words per line",
];

/// Aligned text table with one row per measure and one "mean ± std" column
/// per labelled group.
pub fn render_table(groups: &[(String, ComplexityProfile)]) -> String {
    let cell = |m: &MeanStd| format!("{:.2} ± {:.2}", m.mean, m.std);
    let mut header = vec!["metric".to_string()];
    header.extend(groups.iter().map(|(label, p)| format!("{label} (n={})", p.documents)));
    let mut rows = vec![header];
    for (r, label) in ROW_LABELS.iter().enumerate() {
        let mut row = vec![label.to_string()];
        for (_, p) in groups {
            let m = match r {
                0 => &p.avg_sentence_length,
                1 => &p.commas_per_sentence,
                2 => &p.verb_compound_distance,
                _ => &p.words_per_line,
            };
            row.push(cell(m));
        }
        rows.push(row);
    }
    render_rows(&rows, &[0])
}

/// Aligned columns joined by " | "; the first column is left-aligned, the
/// others right-aligned. A rule line follows each row listed in `rules_after`.
pub(crate) fn render_rows(rows: &[Vec<String>], rules_after: &[usize]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| {
                let pad = widths[c] - s.chars().count();
                if c == 0 {
                    format!("{s}{}", " ".repeat(pad))
                } else {
                    format!("{}{s}", " ".repeat(pad))
                }
            })
            .collect();
        let _ = writeln!(out, "{}", cells.join(" | ").trim_end());
        if rules_after.contains(&i) {
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            let _ = writeln!(out, "{}", rule.join("-|-"));
        }
    }
    out
}
