//! Synthetic market specs in, price and dividend files plus answer key out.

use std::path::{Path, PathBuf};

use serde::Serialize;
use tailpc_core::synth::AnswerKey;
use tailpc_core::{generate, SynthSpec};

use crate::error::{Error, Result};
use crate::ingest::{write_dividends, write_prices};
use crate::manifest::{self, FileDigest, RunManifest};

pub const PRICES: &str = "prices.csv";
pub const DIVIDENDS: &str = "dividends.csv";
pub const ANSWER_KEY: &str = "answer_key.json";

pub fn parse_spec(text: &str) -> Result<SynthSpec> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("synthetic spec: {e}")))
}

pub fn read_spec(path: &Path) -> Result<SynthSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read spec {}: {e}", path.display())))?;
    parse_spec(&text)
}

#[derive(Serialize)]
struct AnswerFile<'a> {
    spec: &'a SynthSpec,
    answer: &'a AnswerKey,
}

/// Generates the market described by the spec file and writes it to `out`.
/// Returns the written files, manifest last.
pub fn run_synth(spec_path: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    let started = manifest::now();
    let spec = read_spec(spec_path)?;
    let market = generate(&spec)?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;

    let write = |name: &str, f: &dyn Fn(&mut Vec<u8>) -> std::io::Result<()>| -> Result<PathBuf> {
        let path = out.join(name);
        let mut buf = Vec::new();
        f(&mut buf).map_err(|e| Error::io(&path, e))?;
        std::fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    };
    let mut files = vec![
        write(PRICES, &|b| write_prices(&market.panel, b))?,
        write(DIVIDENDS, &|b| write_dividends(&market.panel, b))?,
        write(ANSWER_KEY, &|b| {
            serde_json::to_writer_pretty(&mut *b, &AnswerFile { spec: &spec, answer: &market.answer })?;
            b.push(b'\n');
            Ok(())
        })?,
    ];
    let mut m = RunManifest::new("synth", started);
    m.inputs.push(FileDigest::of(spec_path)?);
    files.push(m.finish(out, &files)?);
    Ok(files)
}
