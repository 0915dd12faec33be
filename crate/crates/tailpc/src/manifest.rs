//! Run manifests: what went in, what settings were used, what came out.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use tailpc_core::DetectorConfig;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> Result<Self> {
        let data = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(FileDigest {
            path: path.display().to_string(),
            bytes: data.len() as u64,
            sha256: hex::encode(Sha256::digest(&data)),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WindowParams {
    pub window: usize,
    pub step: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub inputs: Vec<FileDigest>,
    /// Absent for `synth`.
    pub detector_config: Option<DetectorConfig>,
    pub window: Option<WindowParams>,
    pub threads: Option<usize>,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<FileDigest>,
}

pub const FILE_NAME: &str = "manifest.json";

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

impl RunManifest {
    pub fn new(command: &str, started_at: String) -> Self {
        RunManifest {
            tool: crate::TOOL.into(),
            version: crate::VERSION.into(),
            command: command.into(),
            inputs: Vec::new(),
            detector_config: None,
            window: None,
            threads: None,
            started_at,
            finished_at: String::new(),
            outputs: Vec::new(),
        }
    }

    /// Stamps the finish time and writes the manifest into `dir`.
    pub fn finish(mut self, dir: &Path, outputs: &[PathBuf]) -> Result<PathBuf> {
        self.outputs = outputs.iter().map(|p| FileDigest::of(p)).collect::<Result<_>>()?;
        self.finished_at = now();
        let path = dir.join(FILE_NAME);
        let mut text = serde_json::to_string_pretty(&self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}
