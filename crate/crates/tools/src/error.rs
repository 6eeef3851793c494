use std::path::PathBuf;

use serde_json::json;

/// Failures of a CLI run, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("file not found: {}", .0.display())]
    FileMissing(PathBuf),
    #[error("io error on {path}: {msg}", path = .0.display(), msg = .1)]
    Io(PathBuf, String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] qsunif::Error),
    #[error("verification failed: {}", .0.join(", "))]
    VerifyFailed(Vec<String>),
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Core errors that come from iterations or conditioning rather than
/// from the input data.
fn is_numerical(e: &qsunif::Error) -> bool {
    use qsunif::Error::*;
    matches!(e, NonConvergence { .. } | IterationDiverged { .. } | DegenerateTriple | AdmissibilityFailed { .. })
}

impl CliError {
    /// 2 configuration, 3 data, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigInvalid(_) | CliError::FileMissing(_) => 2,
            CliError::Io(..) | CliError::Format(_) => 3,
            CliError::Core(e) if is_numerical(e) => 4,
            CliError::Core(_) => 3,
            CliError::VerifyFailed(_) => 4,
        }
    }

    pub fn kind(&self) -> String {
        match self {
            CliError::ConfigInvalid(_) => "ConfigInvalid".into(),
            CliError::FileMissing(_) => "FileMissing".into(),
            CliError::Io(..) => "Io".into(),
            CliError::Format(_) => "Format".into(),
            CliError::Core(e) => {
                let d = format!("{e:?}");
                d.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Core").to_string()
            }
            CliError::VerifyFailed(_) => "VerifyFailed".into(),
        }
    }

    /// Machine-readable form printed on stderr.
    pub fn to_json(&self) -> String {
        json!({ "error": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() }).to_string()
    }
}
