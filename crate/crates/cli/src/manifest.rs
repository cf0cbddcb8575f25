use std::fs;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Provenance of one command run, written next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: &'static str,
    pub config: Value,
    pub inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<String>,
}

/// Output directory of one run. Every file written through it names the
/// manifest: JSON objects carry a `manifest` field, other formats start
/// with a `# manifest: manifest.json` line.
pub struct RunOutput {
    dir: PathBuf,
    manifest: RunManifest,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::data(format!("{}: {e}", path.display()))
}

impl RunOutput {
    pub fn create(
        dir: &Path,
        command: &str,
        config: Value,
        inputs: &[&Path],
        seed: Option<u64>,
    ) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            manifest: RunManifest {
                command: command.to_string(),
                tool_version: env!("CARGO_PKG_VERSION"),
                config,
                inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
                seed,
                started_at: now(),
                finished_at: String::new(),
                outputs: Vec::new(),
            },
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| io_error(&path, e))?;
        self.manifest.outputs.push(name.to_string());
        Ok(path)
    }

    /// Text, CSV or JSON Lines with a leading manifest comment.
    pub fn write_text(&mut self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        self.write(name, &format!("# manifest: {MANIFEST_FILE}\n{body}"))
    }

    /// A JSON object with a `manifest` field added in front.
    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<PathBuf, CliError> {
        let value = serde_json::to_value(value).map_err(|e| CliError::Internal(e.to_string()))?;
        let Value::Object(fields) = value else {
            return Err(CliError::Internal(format!("{name}: output is not a JSON object")));
        };
        let mut object = serde_json::Map::new();
        object.insert("manifest".into(), Value::String(MANIFEST_FILE.into()));
        object.extend(fields);
        let text = serde_json::to_string_pretty(&Value::Object(object)).map_err(|e| CliError::Internal(e.to_string()))?;
        self.write(name, &(text + "\n"))
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.manifest.finished_at = now();
        let path = self.dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&self.manifest).map_err(|e| CliError::Internal(e.to_string()))?;
        fs::write(&path, text + "\n").map_err(|e| io_error(&path, e))?;
        Ok(path)
    }
}

/// Records in corpus format, one per line.
pub fn jsonl<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut out = String::new();
    for row in rows {
        out.push_str(&serde_json::to_string(row).map_err(|e| CliError::Internal(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}
