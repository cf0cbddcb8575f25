use serde_json::json;
use simplikit::corpus::{
    builtin_templates, synthesize_sources, templates_from_file, to_jsonl, LoadOptions, PrefixStub, SynthesisOptions,
};

use super::load_corpus;
use crate::error::CliError;
use crate::manifest::{jsonl, RunOutput};
use crate::SynthesizeArgs;

pub fn run(args: &SynthesizeArgs) -> Result<(), CliError> {
    if args.max_in_flight == 0 {
        return Err(CliError::Usage("--max-in-flight must be at least 1".into()));
    }
    let records = load_corpus(&args.corpus, LoadOptions { allow_empty_target: false })?;
    let templates = match &args.templates {
        Some(path) => templates_from_file(path)?,
        None => builtin_templates(),
    };
    let provider = PrefixStub::new(args.stub_prefix.clone(), &templates);
    let options = SynthesisOptions {
        max_in_flight: args.max_in_flight,
    };
    let output = synthesize_sources(&records, &provider, &templates, options)?;
    let config = json!({
        "provider": "prefix-stub",
        "stub_prefix": args.stub_prefix,
        "templates": templates.len(),
        "max_in_flight": args.max_in_flight,
    });
    let mut inputs = vec![args.corpus.as_path()];
    inputs.extend(args.templates.as_deref());
    let mut out = RunOutput::create(&args.out_dir, "synthesize", config, &inputs, None)?;
    out.write_text("corpus.jsonl", &to_jsonl(&output.records))?;
    out.write_text("failures.jsonl", &jsonl(&output.failures)?)?;
    out.finish()?;
    Ok(())
}
