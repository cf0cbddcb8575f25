use serde_json::{json, Value};
use simplikit::decoding::{NGramLM, TrainConfig};
use simplikit::corpus::LoadOptions;

use super::{keep_split, load_corpus, split_name};
use crate::error::CliError;
use crate::manifest::RunOutput;
use crate::TrainArgs;

pub fn run(args: &TrainArgs) -> Result<(), CliError> {
    let records = keep_split(load_corpus(&args.corpus, LoadOptions::default())?, args.split);
    let config = TrainConfig {
        order: args.order,
        discount: args.discount,
        min_count: args.min_count,
    };
    let lm = NGramLM::train(&records, &config)?;
    log::info!("trained order-{} model over {} types", lm.order(), lm.vocab().len());
    let snapshot = json!({
        "order": args.order,
        "discount": args.discount,
        "min_count": args.min_count,
        "split": split_name(args.split),
    });
    let mut out = RunOutput::create(&args.out_dir, "train", snapshot, &[&args.corpus], None)?;
    let model: Value = serde_json::from_str(&lm.to_json()).map_err(|e| CliError::Internal(e.to_string()))?;
    out.write_json("model.json", &model)?;
    out.finish()?;
    Ok(())
}
