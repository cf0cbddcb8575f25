use serde_json::json;
use simplikit::corpus::{assign_splits, to_jsonl, LoadOptions};

use super::load_corpus;
use crate::error::CliError;
use crate::manifest::RunOutput;
use crate::SplitArgs;

pub fn run(args: &SplitArgs) -> Result<(), CliError> {
    let mut records = load_corpus(&args.corpus, LoadOptions::default())?;
    assign_splits(&mut records, args.test_size, args.seed)?;
    let config = json!({ "test_size": args.test_size });
    let mut out = RunOutput::create(&args.out_dir, "split", config, &[&args.corpus], Some(args.seed))?;
    out.write_text("corpus.jsonl", &to_jsonl(&records))?;
    out.finish()?;
    Ok(())
}
