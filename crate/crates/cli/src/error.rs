use std::path::PathBuf;

use pcf_core::PcfError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("bad snapshot {path}: {msg}")]
    Snapshot { path: PathBuf, msg: String },

    #[error(transparent)]
    Core(#[from] PcfError),

    /// The solver stopped before t_end; outputs up to the last good state exist.
    #[error("run terminated early ({category}): {message}")]
    Terminated { category: &'static str, message: String },

    #[error("checks failed: {0}")]
    ChecksFailed(String),

    #[error("thread pool: {0}")]
    Pool(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Machine-readable category, printed on failure and stored in summaries.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config { .. } | CliError::Parse(_) => "config",
            CliError::Io { .. } | CliError::Csv(_) | CliError::Json(_) | CliError::Snapshot { .. } => "io",
            CliError::Core(e) => e.category(),
            CliError::Terminated { category, .. } => category,
            CliError::ChecksFailed(_) => "check-failed",
            CliError::Pool(_) => "internal",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "config" | "invalid-input" => 2,
            "singularity" => 3,
            "overflow" => 4,
            "domain" => 5,
            "check-failed" => 6,
            "io" => 7,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
