use std::collections::{HashMap, HashSet};
use std::fmt::Write;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use simplikit::corpus::{CorpusRecord, LoadOptions};
use simplikit::metrics::{
    bleu, meteor, precision_distribution, sari, sari_component_distribution, BleuReport, DistributionSummary,
    MeteorReport, SariComponent, SariReport,
};
use simplikit::Document;

use super::{keep_split, load_corpus, split_name, text_table};
use crate::error::CliError;
use crate::manifest::{jsonl, RunOutput};
use crate::EvalArgs;

#[derive(Serialize)]
struct RecordScores {
    id: String,
    bleu: BleuReport,
    meteor: MeteorReport,
    sari: SariReport,
}

#[derive(Serialize)]
struct Means {
    bleu: f64,
    meteor: f64,
    sari: f64,
}

#[derive(Serialize)]
struct Summary {
    label: String,
    records: usize,
    means: Means,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    distributions: Vec<DistributionSummary>,
}

/// Pair every corpus record with its prediction; any id present on only
/// one side aborts.
fn align<'a>(
    corpus: &'a [CorpusRecord],
    predictions: &'a [CorpusRecord],
) -> Result<Vec<(&'a CorpusRecord, &'a CorpusRecord)>, CliError> {
    let by_id: HashMap<&str, &CorpusRecord> = predictions.iter().map(|p| (p.id.as_str(), p)).collect();
    let corpus_ids: HashSet<&str> = corpus.iter().map(|r| r.id.as_str()).collect();
    let mut details: Vec<String> = corpus
        .iter()
        .filter(|r| !by_id.contains_key(r.id.as_str()))
        .map(|r| format!("no prediction for id {:?}", r.id))
        .collect();
    details.extend(
        predictions
            .iter()
            .filter(|p| !corpus_ids.contains(p.id.as_str()))
            .map(|p| format!("prediction id {:?} not in corpus", p.id)),
    );
    if !details.is_empty() {
        return Err(CliError::Data {
            message: format!("{} id mismatch(es) between corpus and predictions", details.len()),
            details,
        });
    }
    Ok(corpus.iter().map(|r| (r, by_id[r.id.as_str()])).collect())
}

fn score(record: &CorpusRecord, prediction: &CorpusRecord) -> Result<RecordScores, String> {
    let source = Document::new(&record.source);
    let reference = Document::new(&record.target);
    let output = Document::new(&prediction.target);
    let fail = |e: simplikit::metrics::MetricError| format!("record {:?}: {e}", record.id);
    Ok(RecordScores {
        id: record.id.clone(),
        bleu: bleu(&output, &reference).map_err(fail)?,
        meteor: meteor(&output, &reference),
        sari: sari(&source, &output, &reference).map_err(fail)?,
    })
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

pub fn run(args: &EvalArgs, jobs: usize) -> Result<(), CliError> {
    let corpus = keep_split(load_corpus(&args.corpus, LoadOptions::default())?, args.split);
    let predictions = keep_split(
        load_corpus(&args.predictions, LoadOptions { allow_empty_target: true })?,
        args.split,
    );
    if corpus.is_empty() {
        return Err(CliError::data("no records to evaluate"));
    }
    let pairs = align(&corpus, &predictions)?;
    let results: Vec<Result<RecordScores, String>> = pairs.par_iter().map(|(r, p)| score(r, p)).collect();
    let errors: Vec<String> = results.iter().filter_map(|r| r.as_ref().err().cloned()).collect();
    if !errors.is_empty() {
        return Err(CliError::Data {
            message: format!("{} record(s) could not be scored", errors.len()),
            details: errors,
        });
    }
    let scores: Vec<RecordScores> = results.into_iter().map(Result::unwrap).collect();

    let means = Means {
        bleu: mean(scores.iter().map(|s| s.bleu.score)),
        meteor: mean(scores.iter().map(|s| s.meteor.score)),
        sari: mean(scores.iter().map(|s| s.sari.score)),
    };
    let config = json!({
        "label": args.label,
        "split": split_name(args.split),
        "distributions": args.distributions,
        "jobs": jobs,
    });
    let mut out = RunOutput::create(&args.out_dir, "eval", config, &[&args.corpus, &args.predictions], None)?;
    out.write_text("eval_records.jsonl", &jsonl(&scores)?)?;
    let table = text_table(&[
        vec!["model".into(), "BLEU".into(), "METEOR".into(), "SARI".into()],
        vec![
            args.label.clone(),
            format!("{:.2}", means.bleu),
            format!("{:.2}", means.meteor),
            format!("{:.2}", means.sari),
        ],
    ]);
    out.write_text("eval_table.txt", &table)?;

    let mut distributions = Vec::new();
    if args.distributions {
        let bleus: Vec<BleuReport> = scores.iter().map(|s| s.bleu.clone()).collect();
        let saris: Vec<SariReport> = scores.iter().map(|s| s.sari.clone()).collect();
        distributions.push(precision_distribution(&bleus)?);
        for component in [SariComponent::AddF, SariComponent::KeepF, SariComponent::DelPrecision] {
            distributions.push(sari_component_distribution(&saris, component)?);
        }
        let mut precisions = String::from("id,n,precision\n");
        let mut components = String::from("id,n,add_f,keep_f,del_precision\n");
        for s in &scores {
            let id = csv_field(&s.id);
            for (k, p) in s.bleu.precisions.iter().enumerate() {
                writeln!(precisions, "{id},{},{p}", k + 1).expect("string write");
            }
            for c in &s.sari.per_ngram {
                writeln!(components, "{id},{},{},{},{}", c.n, c.add_f, c.keep_f, c.del_precision).expect("string write");
            }
        }
        out.write_text("bleu_precisions.csv", &precisions)?;
        out.write_text("sari_components.csv", &components)?;
    }
    out.write_json(
        "eval_summary.json",
        &Summary {
            label: args.label.clone(),
            records: scores.len(),
            means,
            distributions,
        },
    )?;
    out.finish()?;
    Ok(())
}

/// Quote a CSV field when it holds a separator, quote or line break.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
