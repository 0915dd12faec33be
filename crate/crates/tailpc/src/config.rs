//! TOML run configuration. Command-line flags override the file, and the
//! file overrides built-in defaults.
//!
//! ```toml
//! [detector]
//! trailing_count = 6
//! abs_threshold = 0.2
//! rel_threshold = 0.5
//!
//! [rolling]
//! window = 250
//! step = 50
//!
//! [run]
//! threads = 4
//! rescale_tracks = false
//! audit = false
//! ```

use std::path::Path;

use serde::Deserialize;
use tailpc_core::DetectorConfig;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub detector: DetectorConfig,
    pub rolling: RollingConfig,
    pub run: RunConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RollingConfig {
    pub window: Option<usize>,
    pub step: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub threads: Option<usize>,
    pub rescale_tracks: Option<bool>,
    pub audit: Option<bool>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config file: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Detector settings given on the command line; `None` leaves the file or
/// default value in place.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DetectorFlags {
    pub trailing: Option<usize>,
    pub abs_threshold: Option<f64>,
    pub rel_threshold: Option<f64>,
    pub eigenvalue_ceiling: Option<f64>,
}

impl DetectorFlags {
    pub fn apply(&self, mut cfg: DetectorConfig) -> DetectorConfig {
        if let Some(k) = self.trailing {
            cfg.trailing_count = k;
        }
        if let Some(x) = self.abs_threshold {
            cfg.abs_threshold = x;
        }
        if let Some(x) = self.rel_threshold {
            cfg.rel_threshold = x;
        }
        if let Some(x) = self.eigenvalue_ceiling {
            cfg.eigenvalue_ceiling = Some(x);
        }
        cfg
    }
}
