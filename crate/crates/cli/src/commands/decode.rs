use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use simplikit::corpus::{to_jsonl, CorpusRecord, LoadOptions};
use simplikit::decoding::{decode, DecodeConfig, HaltReason, NGramLM};

use super::{keep_split, load_corpus};
use crate::error::CliError;
use crate::manifest::{jsonl, RunOutput};
use crate::{DecodeArgs, MODEL_DIR_ENV};

#[derive(Serialize)]
struct LogEntry {
    id: String,
    halt_reason: HaltReason,
    tokens: usize,
    total_logprob: f64,
}

fn model_path(args: &DecodeArgs) -> Result<PathBuf, CliError> {
    if let Some(path) = &args.model {
        return Ok(path.clone());
    }
    match std::env::var_os(MODEL_DIR_ENV) {
        Some(dir) => Ok(PathBuf::from(dir).join("model.json")),
        None => Err(CliError::Usage(format!("no --model given and {MODEL_DIR_ENV} is not set"))),
    }
}

/// Flags over the defaults, then the config file over the flags.
pub fn resolve_config(args: &DecodeArgs) -> Result<DecodeConfig, CliError> {
    let mut cfg = DecodeConfig::default();
    macro_rules! flag {
        ($($field:ident),*) => {
            $(if let Some(v) = args.$field {
                cfg.$field = v;
            })*
        };
    }
    flag!(
        algorithm,
        no_ngram_repeat_size,
        max_length,
        num_beams,
        early_stopping,
        top_p,
        top_k,
        temperature,
        penalty_alpha,
        repeat_window,
        repeat_threshold,
        seed
    );
    if args.do_sample.is_some() {
        cfg.do_sample = args.do_sample;
    }
    let cfg = match &args.config {
        Some(path) => cfg.with_overrides_from_file(path)?,
        None => cfg,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(args: &DecodeArgs, jobs: usize) -> Result<(), CliError> {
    let cfg = resolve_config(args)?;
    let model_path = model_path(args)?;
    let lm = NGramLM::load(&model_path)?;
    let records = keep_split(load_corpus(&args.corpus, LoadOptions { allow_empty_target: true })?, args.split);

    let outputs: Vec<(CorpusRecord, LogEntry)> = records
        .par_iter()
        .enumerate()
        .map(|(i, record)| {
            let cfg = DecodeConfig {
                seed: cfg.seed.wrapping_add(i as u64),
                ..cfg.clone()
            };
            let prompt = lm.encode_prompt(&record.source);
            let result = decode(&lm, &prompt, &cfg)?;
            log::info!("{}: {:?} after {} tokens", record.id, result.halt_reason, result.tokens.len());
            let prediction = CorpusRecord {
                target: lm.decode_text(result.content()),
                ..record.clone()
            };
            let entry = LogEntry {
                id: record.id.clone(),
                halt_reason: result.halt_reason,
                tokens: result.tokens.len(),
                total_logprob: result.total_logprob,
            };
            Ok((prediction, entry))
        })
        .collect::<Result<_, simplikit::decoding::DecodeError>>()?;
    let (predictions, log): (Vec<CorpusRecord>, Vec<LogEntry>) = outputs.into_iter().unzip();

    let mut snapshot = serde_json::to_value(&cfg).map_err(|e| CliError::Internal(e.to_string()))?;
    snapshot["jobs"] = jobs.into();
    let mut out = RunOutput::create(
        &args.out_dir,
        "decode",
        snapshot,
        &[&model_path, &args.corpus],
        Some(cfg.seed),
    )?;
    out.write_text("predictions.jsonl", &to_jsonl(&predictions))?;
    out.write_text("decode_log.jsonl", &jsonl(&log)?)?;
    out.finish()?;
    Ok(())
}
