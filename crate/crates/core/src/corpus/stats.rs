use serde::{Deserialize, Serialize};

use super::{CorpusError, CorpusRecord, Split};
use crate::complexity::render_rows;
use crate::text::Document;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub docs: usize,
    pub words: usize,
}

impl SplitCounts {
    fn add(&mut self, other: SplitCounts) {
        self.docs += other.docs;
        self.words += other.words;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRow {
    pub provenance: String,
    pub test: SplitCounts,
    pub train: SplitCounts,
}

/// Document and target-word counts per provenance and split. `total` is the
/// column sum of `rows`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitStats {
    pub rows: Vec<SplitRow>,
    pub total: SplitRow,
}

/// Rows appear in order of first occurrence of each provenance.
pub fn split_stats(corpus: &[CorpusRecord]) -> Result<SplitStats, CorpusError> {
    if corpus.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let mut rows: Vec<SplitRow> = Vec::new();
    for record in corpus {
        let idx = match rows.iter().position(|r| r.provenance == record.provenance) {
            Some(i) => i,
            None => {
                rows.push(SplitRow {
                    provenance: record.provenance.clone(),
                    test: SplitCounts::default(),
                    train: SplitCounts::default(),
                });
                rows.len() - 1
            }
        };
        let counts = SplitCounts {
            docs: 1,
            words: Document::new(&record.target).word_count(),
        };
        match record.split {
            Split::Test => rows[idx].test.add(counts),
            Split::Train => rows[idx].train.add(counts),
        }
    }
    let mut total = SplitRow {
        provenance: "\u{03A3}".into(),
        test: SplitCounts::default(),
        train: SplitCounts::default(),
    };
    for row in &rows {
        total.test.add(row.test);
        total.train.add(row.train);
    }
    Ok(SplitStats { rows, total })
}

impl SplitStats {
    /// Aligned text table: provenance, then docs and words for test and
    /// train, then the Σ row.
    pub fn render_table(&self) -> String {
        let mut rows = vec![
            vec![String::new(), "Test".into(), String::new(), "Train".into(), String::new()],
            vec!["source".into(), "Docs".into(), "Words".into(), "Docs".into(), "Words".into()],
        ];
        for row in self.rows.iter().chain(std::iter::once(&self.total)) {
            rows.push(vec![
                row.provenance.clone(),
                thousands(row.test.docs),
                thousands(row.test.words),
                thousands(row.train.docs),
                thousands(row.train.words),
            ]);
        }
        let last = rows.len() - 2;
        render_rows(&rows, &[1, last])
    }
}

/// `1234567` as `"1,234,567"`.
pub fn thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    out
}
