use serde::Serialize;
use simplikit::complexity::ComplexityError;
use simplikit::corpus::CorpusError;
use simplikit::decoding::DecodeError;
use simplikit::metrics::MetricError;
use thiserror::Error;

/// Exit statuses: 0 ok, 1 usage, 2 data, 3 internal.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{message}")]
    Data { message: String, details: Vec<String> },
    #[error("{0}")]
    Internal(String),
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    kind: &'static str,
    exit_code: i32,
    message: String,
    details: &'a [String],
}

impl CliError {
    pub fn data(message: impl Into<String>) -> Self {
        Self::Data {
            message: message.into(),
            details: Vec::new(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Data { .. } => 2,
            Self::Internal(_) => 3,
        }
    }

    /// One-line JSON object for stderr.
    pub fn to_json(&self) -> String {
        let (kind, details): (&str, &[String]) = match self {
            Self::Usage(_) => ("usage", &[]),
            Self::Data { details, .. } => ("data", details),
            Self::Internal(_) => ("internal", &[]),
        };
        serde_json::to_string(&ErrorReport {
            kind,
            exit_code: self.exit_code(),
            message: self.to_string(),
            details,
        })
        .expect("error report serializes")
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Invalid { origin, diagnostics } => Self::Data {
                message: format!("{origin}: {} invalid record(s)", diagnostics.len()),
                details: diagnostics.iter().map(ToString::to_string).collect(),
            },
            other => Self::data(other.to_string()),
        }
    }
}

impl From<DecodeError> for CliError {
    fn from(e: DecodeError) -> Self {
        match e {
            DecodeError::InvalidConfig { .. } | DecodeError::ConfigSyntax(_) | DecodeError::InvalidOrder(_) => {
                Self::Usage(e.to_string())
            }
            other => Self::data(other.to_string()),
        }
    }
}

impl From<ComplexityError> for CliError {
    fn from(e: ComplexityError) -> Self {
        Self::data(e.to_string())
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        Self::data(e.to_string())
    }
}
