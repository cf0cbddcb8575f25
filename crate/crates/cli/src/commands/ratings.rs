use std::fs;

use serde_json::json;
use simplikit::corpus::{aggregate_ratings, parse_ratings};

use crate::error::CliError;
use crate::manifest::RunOutput;
use crate::RatingsArgs;

pub fn run(args: &RatingsArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.ratings)
        .map_err(|e| CliError::data(format!("{}: {e}", args.ratings.display())))?;
    let summary = aggregate_ratings(&parse_ratings(&text)?)?;
    let mut out = RunOutput::create(&args.out_dir, "ratings", json!({}), &[&args.ratings], None)?;
    out.write_json("ratings.json", &summary)?;
    out.finish()?;
    Ok(())
}
