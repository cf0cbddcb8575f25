use serde_json::json;
use simplikit::corpus::{split_stats, LoadOptions};

use super::load_corpus;
use crate::error::CliError;
use crate::manifest::RunOutput;
use crate::StatsArgs;

pub fn run(args: &StatsArgs) -> Result<(), CliError> {
    let records = load_corpus(&args.corpus, LoadOptions::default())?;
    let stats = split_stats(&records)?;
    let mut out = RunOutput::create(&args.out_dir, "stats", json!({}), &[&args.corpus], None)?;
    out.write_text("stats.txt", &stats.render_table())?;
    out.write_json("stats.json", &stats)?;
    out.finish()?;
    Ok(())
}
