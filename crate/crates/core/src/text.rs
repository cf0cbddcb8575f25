//! Tokenization, sentence/line segmentation and n-gram extraction.
//!
//! Every metric and complexity measure in this crate sees text through the
//! types defined here. The tokenizer is rule based and tuned for German
//! orthography: ordinal numbers ("3. Oktober") and a fixed table of
//! abbreviations ("z.B.", "Dr.") keep their period instead of ending a
//! sentence.

use std::collections::BTreeMap;
use std::fs;
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("n-gram order must be in 1..=4, got {0}")]
    InvalidOrder(usize),
    #[error("failed to read abbreviation list {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Abbreviations that never terminate a sentence.
pub const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "z.B.", "z.T.", "d.h.", "u.a.", "o.ä.", "u.ä.", "s.o.", "s.u.", "bzw.", "usw.", "etc.",
    "ca.", "Dr.", "Nr.", "Prof.", "Hr.", "Fr.", "Str.", "St.", "vgl.", "evtl.", "ggf.", "inkl.",
    "bspw.", "Mio.", "Mrd.", "Jh.", "Abs.", "Tel.", "zzgl.", "max.", "min.", "sog.", "v.a.",
];

const MONTHS_AND_ORDINAL_NOUNS: &[&str] = &[
    "Januar", "Jänner", "Februar", "März", "April", "Mai", "Juni", "Juli", "August",
    "September", "Oktober", "November", "Dezember", "Jahrhundert", "Platz", "Mal", "Klasse",
    "Liga", "Stock", "Runde", "Spieltag",
];

const LINE_START_BULLETS: &[char] = &['*', '-', '–', '—', '·'];
const BULLETS: &[char] = &['•', '◦', '▪', '‣'];
const TERMINALS: &[char] = &['.', '!', '?', ':'];
const CLOSERS: &[char] = &[')', ']', '}', '"', '\'', '“', '”', '’', '»', '«'];
const CONNECTORS: &[char] = &['-', '\'', '’'];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Word,
    Number,
    Punctuation,
    Comma,
    SentenceTerminal,
    LineBreak,
    Bullet,
}

impl TokenKind {
    /// Word and number tokens are what the complexity metrics count as words.
    pub fn is_word(self) -> bool {
        matches!(self, TokenKind::Word | TokenKind::Number)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub kind: TokenKind,
    /// Character (not byte) index of the first character in the source text.
    pub offset: usize,
}

impl Token {
    pub fn char_len(&self) -> usize {
        self.surface.chars().count()
    }
}

/// Rule-based tokenizer with a configurable abbreviation table.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    // lowercased, longest first
    abbreviations: Vec<Vec<char>>,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Self::with_abbreviations(DEFAULT_ABBREVIATIONS.iter().copied())
    }
}

impl Tokenizer {
    pub fn with_abbreviations<'a>(abbreviations: impl IntoIterator<Item = &'a str>) -> Self {
        let mut abbreviations: Vec<Vec<char>> = abbreviations
            .into_iter()
            .map(|a| a.trim().to_lowercase().chars().collect::<Vec<_>>())
            .filter(|a| !a.is_empty())
            .collect();
        abbreviations.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        abbreviations.dedup();
        Self { abbreviations }
    }

    /// Built-in table extended with one abbreviation per line from `path`.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn extended_from_file(path: impl AsRef<Path>) -> Result<Self, TextError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| TextError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let extra = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        Ok(Self::with_abbreviations(
            DEFAULT_ABBREVIATIONS.iter().copied().chain(extra),
        ))
    }

    pub fn tokenize(&self, text: &str) -> Vec<Token> {
        let chars: Vec<char> = text.chars().collect();
        let mut tokens = Vec::new();
        let mut at_line_start = true;
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c == '\n' {
                tokens.push(make_token(&chars, i, i + 1, TokenKind::LineBreak));
                at_line_start = true;
                i += 1;
                continue;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let (end, kind) = if c.is_alphanumeric() {
                self.scan_alphanumeric(&chars, i)
            } else if BULLETS.contains(&c)
                || (at_line_start
                    && LINE_START_BULLETS.contains(&c)
                    && chars.get(i + 1).map_or(true, |n| n.is_whitespace()))
            {
                (i + 1, TokenKind::Bullet)
            } else if c == ',' {
                (i + 1, TokenKind::Comma)
            } else if TERMINALS.contains(&c) {
                (i + 1, TokenKind::SentenceTerminal)
            } else {
                (i + 1, TokenKind::Punctuation)
            };
            tokens.push(make_token(&chars, i, end, kind));
            at_line_start = false;
            i = end;
        }
        tokens
    }

    fn scan_alphanumeric(&self, chars: &[char], start: usize) -> (usize, TokenKind) {
        if let Some(end) = self.match_abbreviation(chars, start) {
            return (end, TokenKind::Word);
        }
        if chars[start].is_numeric() {
            let mut j = start;
            while j < chars.len() && chars[j].is_numeric() {
                j += 1;
            }
            let mut plain = true;
            while j + 1 < chars.len() && matches!(chars[j], '.' | ',') && chars[j + 1].is_numeric()
            {
                plain = false;
                j += 1;
                while j < chars.len() && chars[j].is_numeric() {
                    j += 1;
                }
            }
            if j < chars.len() && chars[j].is_alphabetic() {
                // "10er", "3D"
                return (scan_word(chars, j), TokenKind::Word);
            }
            if plain && j - start <= 3 && chars.get(j) == Some(&'.') && ordinal_follows(chars, j + 1)
            {
                return (j + 1, TokenKind::Number);
            }
            return (j, TokenKind::Number);
        }
        (scan_word(chars, start), TokenKind::Word)
    }

    fn match_abbreviation(&self, chars: &[char], start: usize) -> Option<usize> {
        self.abbreviations.iter().find_map(|abbr| {
            let end = start + abbr.len();
            if end > chars.len() {
                return None;
            }
            let matches = chars[start..end]
                .iter()
                .zip(abbr)
                .all(|(c, a)| c.to_lowercase().eq(std::iter::once(*a)) || c == a);
            let bounded = chars.get(end).map_or(true, |c| !c.is_alphanumeric());
            (matches && bounded).then_some(end)
        })
    }
}

fn make_token(chars: &[char], start: usize, end: usize, kind: TokenKind) -> Token {
    Token {
        surface: chars[start..end].iter().collect(),
        kind,
        offset: start,
    }
}

fn scan_word(chars: &[char], start: usize) -> usize {
    let mut j = start;
    while j < chars.len() {
        let c = chars[j];
        if c.is_alphanumeric() {
            j += 1;
        } else if CONNECTORS.contains(&c)
            && j > start
            && chars.get(j + 1).is_some_and(|n| n.is_alphanumeric())
        {
            j += 1;
        } else {
            break;
        }
    }
    j
}

/// An ordinal period is followed by horizontal whitespace and then a
/// lowercase word, a number, or a month/ordinal noun.
fn ordinal_follows(chars: &[char], from: usize) -> bool {
    let mut k = from;
    while k < chars.len() && chars[k].is_whitespace() && chars[k] != '\n' {
        k += 1;
    }
    if k == from || k >= chars.len() {
        return false;
    }
    let c = chars[k];
    if c.is_lowercase() || c.is_numeric() {
        return true;
    }
    MONTHS_AND_ORDINAL_NOUNS.iter().any(|word| {
        let w: Vec<char> = word.chars().collect();
        chars.len() >= k + w.len()
            && chars[k..k + w.len()] == w[..]
            && chars.get(k + w.len()).map_or(true, |n| !n.is_alphanumeric())
    })
}

/// Tokenize with the built-in abbreviation table.
pub fn tokenize(text: &str) -> Vec<Token> {
    Tokenizer::default().tokenize(text)
}

/// Tokenized text with sentence and line structure.
///
/// Sentence ranges start and end on non-LineBreak tokens; a sentence may
/// span a line break, in which case the LineBreak lies inside its range but
/// is not counted as a member (see [`Document::sentence_tokens`]). Line
/// ranges partition all tokens, each line including its terminating
/// LineBreak.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub raw: String,
    pub tokens: Vec<Token>,
    pub sentences: Vec<Range<usize>>,
    pub lines: Vec<Range<usize>>,
}

impl Document {
    pub fn new(text: &str) -> Self {
        Self::with_tokenizer(text, &Tokenizer::default())
    }

    pub fn with_tokenizer(text: &str, tokenizer: &Tokenizer) -> Self {
        let mut doc = segment(tokenizer.tokenize(text));
        doc.raw = text.to_string();
        doc
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Non-LineBreak tokens of sentence `index`.
    pub fn sentence_tokens(&self, index: usize) -> impl Iterator<Item = &Token> + '_ {
        self.tokens[self.sentences[index].clone()]
            .iter()
            .filter(|t| t.kind != TokenKind::LineBreak)
    }

    pub fn line_tokens(&self, index: usize) -> &[Token] {
        &self.tokens[self.lines[index].clone()]
    }

    /// Tokens the metrics operate on: everything except line breaks.
    pub fn metric_tokens(&self) -> Vec<&Token> {
        self.tokens
            .iter()
            .filter(|t| t.kind != TokenKind::LineBreak)
            .collect()
    }

    pub fn word_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.kind.is_word()).count()
    }
}

/// Build sentence and line structure over a token sequence.
///
/// A sentence ends after a run of SentenceTerminal tokens together with
/// any closing quotes or brackets directly following it. Material after the
/// last terminal forms a final sentence.
pub fn segment(tokens: Vec<Token>) -> Document {
    let mut sentences = Vec::new();
    let mut start: Option<usize> = None;
    let mut last_member = 0;
    let mut i = 0;
    while i < tokens.len() {
        let tok = &tokens[i];
        if tok.kind == TokenKind::LineBreak {
            i += 1;
            continue;
        }
        let first = *start.get_or_insert(i);
        last_member = i;
        if tok.kind == TokenKind::SentenceTerminal {
            let mut end = i + 1;
            while end < tokens.len() && is_sentence_tail(&tokens[end - 1], &tokens[end]) {
                end += 1;
            }
            sentences.push(first..end);
            start = None;
            i = end;
            continue;
        }
        i += 1;
    }
    if let Some(first) = start {
        sentences.push(first..last_member + 1);
    }

    let mut lines = Vec::new();
    let mut line_start = 0;
    for (idx, tok) in tokens.iter().enumerate() {
        if tok.kind == TokenKind::LineBreak {
            lines.push(line_start..idx + 1);
            line_start = idx + 1;
        }
    }
    if line_start < tokens.len() {
        lines.push(line_start..tokens.len());
    }

    Document {
        raw: String::new(),
        tokens,
        sentences,
        lines,
    }
}

/// Terminals always extend a terminal run; closing quotes and brackets only
/// when they touch the preceding token.
fn is_sentence_tail(prev: &Token, tok: &Token) -> bool {
    match tok.kind {
        TokenKind::SentenceTerminal => true,
        TokenKind::Punctuation => {
            tok.offset == prev.offset + prev.char_len()
                && tok.surface.chars().all(|c| CLOSERS.contains(&c))
        }
        _ => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NGramFilter {
    /// Drop LineBreak tokens; punctuation and bullets participate.
    WordsOnly,
    AllTokens,
}

/// Counted, lowercased n-grams of one order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NGramMultiset {
    pub n: usize,
    pub counts: BTreeMap<Vec<String>, usize>,
}

impl NGramMultiset {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, gram: &[String]) -> usize {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

pub fn ngrams<'a>(
    tokens: impl IntoIterator<Item = &'a Token>,
    n: usize,
    filter: NGramFilter,
) -> Result<NGramMultiset, TextError> {
    if !(1..=4).contains(&n) {
        return Err(TextError::InvalidOrder(n));
    }
    let units: Vec<String> = tokens
        .into_iter()
        .filter(|t| filter == NGramFilter::AllTokens || t.kind != TokenKind::LineBreak)
        .map(|t| t.surface.to_lowercase())
        .collect();
    Ok(count_windows(&units, n))
}

pub(crate) fn count_windows(units: &[String], n: usize) -> NGramMultiset {
    let mut counts = BTreeMap::new();
    if units.len() >= n {
        for window in units.windows(n) {
            *counts.entry(window.to_vec()).or_insert(0) += 1;
        }
    }
    NGramMultiset { n, counts }
}
