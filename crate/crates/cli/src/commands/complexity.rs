use serde::Serialize;
use serde_json::json;
use simplikit::complexity::{profile, render_table, ComplexityError, ComplexityProfile, SeparableVerbLexicon};
use simplikit::corpus::{CorpusRecord, LoadOptions};
use simplikit::Document;

use super::load_corpus;
use crate::error::CliError;
use crate::manifest::RunOutput;
use crate::ComplexityArgs;

const GROUP_KEYS: [&str; 4] = ["provenance", "split", "template", "none"];

#[derive(Serialize)]
struct Group {
    label: String,
    profile: ComplexityProfile,
}

#[derive(Serialize)]
struct Report<'a> {
    field: &'a str,
    group_by: &'a str,
    groups: Vec<Group>,
}

fn group_label(record: &CorpusRecord, key: &str, fallback: &str) -> String {
    match key {
        "provenance" => record.provenance.clone(),
        "split" => record.split.as_str().to_string(),
        "template" => record.template_id.map_or_else(|| "none".to_string(), |t| format!("template {t}")),
        _ => fallback.to_string(),
    }
}

pub fn run(args: &ComplexityArgs) -> Result<(), CliError> {
    if !GROUP_KEYS.contains(&args.group_by.as_str()) {
        return Err(CliError::Usage(format!(
            "unknown group key {:?}; expected one of {}",
            args.group_by,
            GROUP_KEYS.join(", ")
        )));
    }
    let use_source = match args.field.as_str() {
        "target" => false,
        "source" => true,
        other => return Err(CliError::Usage(format!("unknown field {other:?}; expected target or source"))),
    };
    let lexicon = match &args.lexicon {
        Some(path) => SeparableVerbLexicon::from_file(path)?,
        None => SeparableVerbLexicon::default(),
    };
    let records = load_corpus(&args.corpus, LoadOptions::default())?;

    // groups in order of first appearance
    let mut groups: Vec<(String, Vec<&CorpusRecord>)> = Vec::new();
    for record in &records {
        let label = group_label(record, &args.group_by, &args.label);
        match groups.iter_mut().find(|(l, _)| *l == label) {
            Some((_, members)) => members.push(record),
            None => groups.push((label, vec![record])),
        }
    }
    let mut profiles = Vec::new();
    for (label, members) in groups {
        let docs: Vec<Document> = members
            .iter()
            .map(|r| Document::new(if use_source { &r.source } else { &r.target }))
            .collect();
        let profile = profile(&docs, &lexicon).map_err(|e| match e {
            ComplexityError::Document { index, source } => {
                CliError::data(format!("record {:?}: {source}", members[index].id))
            }
            other => other.into(),
        })?;
        profiles.push((label, profile));
    }

    let config = json!({ "group_by": args.group_by, "field": args.field, "label": args.label });
    let mut inputs = vec![args.corpus.as_path()];
    inputs.extend(args.lexicon.as_deref());
    let mut out = RunOutput::create(&args.out_dir, "complexity", config, &inputs, None)?;
    out.write_text("complexity.txt", &render_table(&profiles))?;
    let report = Report {
        field: &args.field,
        group_by: &args.group_by,
        groups: profiles.into_iter().map(|(label, profile)| Group { label, profile }).collect(),
    };
    out.write_json("complexity.json", &report)?;
    out.finish()?;
    Ok(())
}
