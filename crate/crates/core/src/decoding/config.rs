use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::DecodeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Greedy,
    Beam,
    Sampling,
    Contrastive,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Greedy,
        Algorithm::Beam,
        Algorithm::Sampling,
        Algorithm::Contrastive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Beam => "beam",
            Algorithm::Sampling => "sampling",
            Algorithm::Contrastive => "contrastive",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = DecodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| DecodeError::InvalidConfig {
                key: "algorithm",
                message: format!("unknown algorithm {s:?}"),
            })
    }
}

/// Fine-tuning hyperparameters. Kept so a config file can carry the full
/// parameter table; nothing here reads them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinetuningConfig {
    pub learning_rate: Option<f64>,
    pub weight_decay: Option<f64>,
    pub batch_size: Option<u32>,
    pub n_epochs: Option<u32>,
}

/// Decoding parameters. Keys match the usual generation-parameter names;
/// `repeat_window`, `repeat_threshold` and `seed` are additions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecodeConfig {
    pub algorithm: Algorithm,
    /// Size of n-grams that may not repeat in the output; 0 disables.
    pub no_ngram_repeat_size: usize,
    /// Maximum generated tokens, EOS included.
    pub max_length: usize,
    pub num_beams: usize,
    pub early_stopping: bool,
    /// Must agree with `algorithm` when given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub do_sample: Option<bool>,
    pub top_p: f64,
    pub top_k: usize,
    pub temperature: f64,
    pub penalty_alpha: f64,
    /// Trailing window, in generated tokens, for the repetition halt.
    pub repeat_window: usize,
    /// Highest allowed count of one token inside the window.
    pub repeat_threshold: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finetuning: Option<FinetuningConfig>,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Greedy,
            no_ngram_repeat_size: 5,
            max_length: 1024,
            num_beams: 5,
            early_stopping: true,
            do_sample: None,
            top_p: 0.95,
            top_k: 5,
            temperature: 0.5,
            penalty_alpha: 0.05,
            repeat_window: 30,
            repeat_threshold: 4,
            seed: 0,
            finetuning: None,
        }
    }
}

fn read(path: &Path) -> Result<String, DecodeError> {
    fs::read_to_string(path).map_err(|source| DecodeError::Io {
        path: path.display().to_string(),
        source,
    })
}

impl DecodeConfig {
    pub fn for_algorithm(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            ..Self::default()
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, DecodeError> {
        let config: Self = toml::from_str(text).map_err(|e| DecodeError::ConfigSyntax(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, DecodeError> {
        Self::from_toml(&read(path.as_ref())?)
    }

    /// This config with every key present in `text` replaced.
    pub fn with_overrides(&self, text: &str) -> Result<Self, DecodeError> {
        let syntax = |e: &dyn fmt::Display| DecodeError::ConfigSyntax(e.to_string());
        let overrides: toml::Table = toml::from_str(text).map_err(|e| syntax(&e))?;
        let toml::Value::Table(mut merged) = toml::Value::try_from(self).map_err(|e| syntax(&e))? else {
            unreachable!("a struct serializes to a table")
        };
        merged.extend(overrides);
        let config: Self = toml::Value::Table(merged).try_into().map_err(|e| syntax(&e))?;
        config.validate()?;
        Ok(config)
    }

    pub fn with_overrides_from_file(&self, path: impl AsRef<Path>) -> Result<Self, DecodeError> {
        self.with_overrides(&read(path.as_ref())?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    /// Check value ranges; the error names the offending key.
    pub fn validate(&self) -> Result<(), DecodeError> {
        let fail = |key: &'static str, message: String| Err(DecodeError::InvalidConfig { key, message });
        if self.max_length == 0 {
            return fail("max_length", "must be at least 1".into());
        }
        if self.num_beams == 0 {
            return fail("num_beams", "must be at least 1".into());
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return fail("top_p", format!("must be in (0, 1], got {}", self.top_p));
        }
        if self.top_k == 0 {
            return fail("top_k", "must be at least 1".into());
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return fail("temperature", format!("must be positive, got {}", self.temperature));
        }
        if !(0.0..=1.0).contains(&self.penalty_alpha) {
            return fail("penalty_alpha", format!("must be in [0, 1], got {}", self.penalty_alpha));
        }
        if self.repeat_window == 0 {
            return fail("repeat_window", "must be at least 1".into());
        }
        if self.repeat_threshold == 0 {
            return fail("repeat_threshold", "must be at least 1".into());
        }
        if let Some(sample) = self.do_sample {
            if sample != (self.algorithm == Algorithm::Sampling) {
                return fail(
                    "do_sample",
                    format!("do_sample = {sample} contradicts algorithm = {}", self.algorithm),
                );
            }
        }
        Ok(())
    }
}
