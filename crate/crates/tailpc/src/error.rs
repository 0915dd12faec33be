use std::path::PathBuf;

use tailpc_core::{DetectError, PanelError, ReturnsError, SpectraError, SynthError};

/// Every failure the tool can report, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: u64, message: String },

    #[error("{0}")]
    Data(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// 1 for configuration problems, 2 for anything wrong with the data or files.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Parse { .. } => "parse",
            Error::Data(_) => "data",
            Error::Io { .. } => "io",
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// One-line JSON object for standard error.
    pub fn to_json(&self) -> String {
        let mut obj = serde_json::json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        if let Error::Parse { path, line, .. } = self {
            obj["path"] = path.clone().into();
            obj["line"] = (*line).into();
        }
        obj.to_string()
    }
}

impl From<PanelError> for Error {
    fn from(e: PanelError) -> Self {
        Error::Data(e.to_string())
    }
}

impl From<ReturnsError> for Error {
    fn from(e: ReturnsError) -> Self {
        Error::Data(e.to_string())
    }
}

impl From<SpectraError> for Error {
    fn from(e: SpectraError) -> Self {
        Error::Data(e.to_string())
    }
}

impl From<DetectError> for Error {
    fn from(e: DetectError) -> Self {
        match e {
            DetectError::Config(_) | DetectError::Window(_) => Error::Config(e.to_string()),
            _ => Error::Data(e.to_string()),
        }
    }
}

impl From<SynthError> for Error {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::Panel(p) => p.into(),
            other => Error::Config(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
