pub mod complexity;
pub mod decode;
pub mod eval;
pub mod ratings;
pub mod split;
pub mod stats;
pub mod synthesize;
pub mod train;

use std::path::Path;

use simplikit::corpus::{self, CorpusRecord, LoadOptions, Split};

use crate::error::CliError;
use crate::SplitFilter;

pub fn load_corpus(path: &Path, options: LoadOptions) -> Result<Vec<CorpusRecord>, CliError> {
    Ok(corpus::load_with(path, options)?)
}

pub fn keep_split(records: Vec<CorpusRecord>, filter: SplitFilter) -> Vec<CorpusRecord> {
    let wanted = match filter {
        SplitFilter::All => return records,
        SplitFilter::Train => Split::Train,
        SplitFilter::Test => Split::Test,
    };
    records.into_iter().filter(|r| r.split == wanted).collect()
}

pub fn split_name(filter: SplitFilter) -> &'static str {
    match filter {
        SplitFilter::Train => "train",
        SplitFilter::Test => "test",
        SplitFilter::All => "all",
    }
}

/// Rows joined by " | ", first column left-aligned and the rest
/// right-aligned, with a rule under the header.
pub fn text_table(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let line = |row: &Vec<String>| {
        row.iter()
            .enumerate()
            .map(|(c, cell)| {
                if c == 0 {
                    format!("{cell:<w$}", w = widths[c])
                } else {
                    format!("{cell:>w$}", w = widths[c])
                }
            })
            .collect::<Vec<_>>()
            .join(" | ")
    };
    let mut out = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        out.push(line(row));
        if i == 0 {
            out.push(widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().join("-|-"));
        }
    }
    out.join("\n") + "\n"
}
