use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A single validation failure, tied to the scenario entry that caused it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub entry: String,
    pub reason: String,
}

impl Issue {
    pub fn new(entry: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            entry: entry.into(),
            reason: reason.into(),
        }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entry, self.reason)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("{}", join_issues(.0))]
    Validation(Vec<Issue>),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown sensitivity parameter `{0}` (expected usage_multiplier, tenant_count_multiplier or rate_multiplier)")]
    UnknownParameter(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(entry: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation(vec![Issue::new(entry, reason)])
    }

    pub(crate) fn from_toml(err: toml::de::Error, source: &str) -> Self {
        let msg = err.message().trim().to_string();
        match err.span() {
            Some(span) => {
                let line = source[..span.start.min(source.len())].matches('\n').count() + 1;
                Error::Parse(format!("line {line}: {msg}"))
            }
            None => Error::Parse(msg),
        }
    }

    /// One diagnostic line per underlying failure.
    pub fn diagnostics(&self) -> Vec<String> {
        match self {
            Error::Validation(issues) => issues.iter().map(ToString::to_string).collect(),
            other => vec![other.to_string()],
        }
    }
}

fn join_issues(issues: &[Issue]) -> String {
    issues
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
