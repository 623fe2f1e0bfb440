use std::path::PathBuf;

use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("invalid config {path}: {reason}")]
    Config { path: PathBuf, reason: String },

    #[error("stage `{stage}` needs {path}; run the earlier stages first")]
    MissingArtifact { stage: &'static str, path: PathBuf },

    #[error("artifact {path} is unreadable: {reason}")]
    BadArtifact { path: PathBuf, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] mtaudit_core::Error),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn bad_artifact(path: impl Into<PathBuf>, reason: impl ToString) -> Self {
        Self::BadArtifact {
            path: path.into(),
            reason: reason.to_string(),
        }
    }

    /// 2 for usage and missing prerequisites, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Config { .. } | Self::MissingArtifact { .. } => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Usage(_) => "usage",
            Self::Config { .. } => "config",
            Self::MissingArtifact { .. } => "missing_artifact",
            Self::BadArtifact { .. } => "bad_artifact",
            Self::Io { .. } => "io",
            Self::Core(_) => "pipeline",
        }
    }

    /// The machine-readable form printed on stderr.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
    }
}
