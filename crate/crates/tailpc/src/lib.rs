//! File formats, reports and the `tailpc` command line around
//! [`tailpc_core`].
//!
//! * [`ingest`]: price and dividend CSV files;
//! * [`report`]: eigenvalue tables, biplots, price tracks and the detection report;
//! * [`analyze`]: the pipeline from files to an output directory;
//! * [`synth_io`]: synthetic markets to files;
//! * [`cli`]: argument handling and exit codes.

pub mod analyze;
pub mod cli;
pub mod config;
pub mod error;
pub mod ingest;
pub mod manifest;
pub mod report;
pub mod synth_io;

pub use error::{Error, Result};
pub use tailpc_core as core;

pub const TOOL: &str = "tailpc";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
