use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{CorpusError, CorpusRecord};

/// Placeholder replaced by the simplified text.
pub const TEMPLATE_SLOT: &str = "{simplification}";

const BUILTIN_TEMPLATES: &str = include_str!("../../data/prompt_templates.txt");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    /// 1-based position in the template file.
    pub id: u32,
    pub text: String,
}

impl PromptTemplate {
    pub fn render(&self, simplification: &str) -> String {
        self.text.replacen(TEMPLATE_SLOT, simplification, 1)
    }
}

/// One template per non-comment line, `\n` and `\\` escapes, slot exactly
/// once per template.
pub fn parse_templates(text: &str) -> Result<Vec<PromptTemplate>, CorpusError> {
    let mut templates = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let line_no = idx + 1;
        let body = unescape(line).map_err(|message| CorpusError::Template {
            line: line_no,
            message,
        })?;
        let slots = body.matches(TEMPLATE_SLOT).count();
        if slots != 1 {
            return Err(CorpusError::Template {
                line: line_no,
                message: format!("expected the slot {TEMPLATE_SLOT} once, found it {slots} times"),
            });
        }
        templates.push(PromptTemplate {
            id: templates.len() as u32 + 1,
            text: body,
        });
    }
    if templates.is_empty() {
        return Err(CorpusError::NoTemplates);
    }
    Ok(templates)
}

fn unescape(line: &str) -> Result<String, String> {
    let mut out = String::with_capacity(line.len());
    let mut chars = line.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('\\') => out.push('\\'),
            other => return Err(format!("unsupported escape \\{}", other.map_or(String::new(), String::from))),
        }
    }
    Ok(out)
}

/// The fifteen templates shipped with the crate.
pub fn builtin_templates() -> Vec<PromptTemplate> {
    parse_templates(BUILTIN_TEMPLATES).expect("built-in templates are well formed")
}

pub fn templates_from_file(path: impl AsRef<Path>) -> Result<Vec<PromptTemplate>, CorpusError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_templates(&text)
}

/// A text generator that turns a prompt into a source text. Failures carry
/// a human-readable reason.
pub trait SynthesisProvider: Send + Sync {
    fn generate(&self, prompt: &str) -> Result<String, String>;
}

/// Deterministic provider: returns `prefix` followed by the simplification
/// that was substituted into the prompt.
#[derive(Debug, Clone)]
pub struct PrefixStub {
    pub prefix: String,
    pub templates: Vec<PromptTemplate>,
}

impl PrefixStub {
    pub fn new(prefix: impl Into<String>, templates: &[PromptTemplate]) -> Self {
        Self {
            prefix: prefix.into(),
            templates: templates.to_vec(),
        }
    }

    fn extract<'a>(&self, prompt: &'a str) -> Option<&'a str> {
        self.templates.iter().find_map(|t| {
            let (before, after) = t.text.split_once(TEMPLATE_SLOT)?;
            prompt.strip_prefix(before)?.strip_suffix(after)
        })
    }
}

impl SynthesisProvider for PrefixStub {
    fn generate(&self, prompt: &str) -> Result<String, String> {
        let body = self.extract(prompt).unwrap_or(prompt);
        Ok(format!("{}{}", self.prefix, body))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthesisOptions {
    /// Upper bound on concurrent provider calls.
    pub max_in_flight: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self { max_in_flight: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisFailure {
    pub index: usize,
    pub id: String,
    pub template_id: u32,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisOutput {
    pub records: Vec<CorpusRecord>,
    pub failures: Vec<SynthesisFailure>,
}

/// Generate a source text for every record from its target.
///
/// Record `i` uses `templates[i % templates.len()]`. Successful records keep
/// input order and carry their template id; failures are logged and
/// returned alongside. Fails only when no call succeeded.
pub fn synthesize_sources(
    simplifications: &[CorpusRecord],
    provider: &dyn SynthesisProvider,
    templates: &[PromptTemplate],
    options: SynthesisOptions,
) -> Result<SynthesisOutput, CorpusError> {
    if templates.is_empty() {
        return Err(CorpusError::NoTemplates);
    }
    let results: Vec<Mutex<Option<Result<String, String>>>> =
        simplifications.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = options.max_in_flight.max(1).min(simplifications.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(record) = simplifications.get(i) else {
                    break;
                };
                let prompt = templates[i % templates.len()].render(&record.target);
                let outcome = provider.generate(&prompt);
                *results[i].lock().expect("result slot poisoned") = Some(outcome);
            });
        }
    });

    let mut output = SynthesisOutput {
        records: Vec::new(),
        failures: Vec::new(),
    };
    for (i, (record, slot)) in simplifications.iter().zip(results).enumerate() {
        let template_id = templates[i % templates.len()].id;
        let outcome = slot
            .into_inner()
            .expect("result slot poisoned")
            .expect("every index is processed");
        match outcome {
            Ok(source) => output.records.push(CorpusRecord {
                source,
                template_id: Some(template_id),
                ..record.clone()
            }),
            Err(reason) => {
                log::warn!("synthesis failed for record {}: {reason}", record.id);
                output.failures.push(SynthesisFailure {
                    index: i,
                    id: record.id.clone(),
                    template_id,
                    reason,
                });
            }
        }
    }
    if output.records.is_empty() && !output.failures.is_empty() {
        return Err(CorpusError::AllSynthesisFailed {
            failures: output.failures,
        });
    }
    Ok(output)
}
