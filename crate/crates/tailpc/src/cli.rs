//! Command-line front end.
//!
//! Exit codes: 0 on success (including when nothing is found), 1 for
//! configuration and usage errors, 2 for data and file errors. Errors are
//! also printed to standard error as a one-line JSON object.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use tailpc_core::DetectorConfig;

use crate::analyze::{run_analyze, AnalyzeOptions};
use crate::config::{DetectorFlags, FileConfig};
use crate::error::{Error, Result};
use crate::manifest::WindowParams;
use crate::synth_io::run_synth;

#[derive(Debug, Parser)]
#[command(name = "tailpc", version, about = "Find highly correlated assets in the lowest-variance principal components")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Detect correlated groups in a price panel and write reports.
    Analyze(AnalyzeArgs),
    /// Generate a synthetic market from a JSON spec.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Prices CSV with header `date,ticker,close`.
    #[arg(long, value_name = "FILE")]
    prices: PathBuf,
    /// Dividends CSV with header `date,ticker,amount`.
    #[arg(long, value_name = "FILE")]
    dividends: Option<PathBuf>,
    /// Number of smallest-eigenvalue components to scan.
    #[arg(long, value_name = "K")]
    trailing: Option<usize>,
    #[arg(long, value_name = "X")]
    abs_threshold: Option<f64>,
    #[arg(long, value_name = "X")]
    rel_threshold: Option<f64>,
    /// Scan every component with eigenvalue below X instead of a fixed count.
    #[arg(long, value_name = "X")]
    eigenvalue_ceiling: Option<f64>,
    /// Rolling window length in return observations.
    #[arg(long, value_name = "N")]
    window: Option<usize>,
    /// Distance between window starts (default: the window length).
    #[arg(long, value_name = "M")]
    step: Option<usize>,
    #[arg(long, value_name = "DIR", default_value = "tailpc-out")]
    out: PathBuf,
    /// TOML configuration; flags take precedence over it.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads for rolling windows.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Draw each member of a price-track chart on its own scale.
    #[arg(long)]
    rescale_tracks: bool,
    /// Also write adjusted prices, returns, the correlation matrix and all eigenvalues.
    #[arg(long)]
    audit: bool,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// JSON synthetic market spec.
    #[arg(long, value_name = "FILE")]
    spec: PathBuf,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

fn analyze_options(a: AnalyzeArgs) -> Result<AnalyzeOptions> {
    let file = match &a.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let flags = DetectorFlags {
        trailing: a.trailing,
        abs_threshold: a.abs_threshold,
        rel_threshold: a.rel_threshold,
        eigenvalue_ceiling: a.eigenvalue_ceiling,
    };
    let config: DetectorConfig = flags.apply(file.detector);
    let window = a.window.or(file.rolling.window);
    let step = a.step.or(file.rolling.step);
    let window = match (window, step) {
        (Some(window), step) => Some(WindowParams { window, step: step.unwrap_or(window) }),
        (None, Some(_)) => return Err(Error::Config("--step needs --window".into())),
        (None, None) => None,
    };
    Ok(AnalyzeOptions {
        prices: a.prices,
        dividends: a.dividends,
        out: a.out,
        config,
        window,
        threads: a.threads.or(file.run.threads),
        rescale_tracks: a.rescale_tracks || file.run.rescale_tracks.unwrap_or(false),
        audit: a.audit || file.run.audit.unwrap_or(false),
    })
}

fn execute(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Analyze(a) => {
            let opts = analyze_options(a)?;
            let outcome = run_analyze(&opts)?;
            for w in &outcome.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            let r = &outcome.report;
            let _ = writeln!(
                stdout,
                "{} group(s) among {} tickers over {} returns; wrote {} files to {}",
                r.groups.len(),
                r.universe.tickers,
                r.universe.returns,
                outcome.files.len(),
                opts.out.display()
            );
            for g in &r.groups {
                let _ = writeln!(stdout, "  group {}: {} (PCs {:?})", g.id, g.group.members.join(", "), g.group.detecting_pcs);
            }
            Ok(())
        }
        Command::Synth(s) => {
            let files = run_synth(&s.spec, &s.out)?;
            let _ = writeln!(stdout, "wrote {} files to {}", files.len(), s.out.display());
            Ok(())
        }
    }
}

/// Runs the tool on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let _ = write!(stderr, "{}", e.render());
            let err = Error::Config(format!("usage: {}", e.kind()));
            let _ = writeln!(stderr, "{}", err.to_json());
            return err.exit_code();
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            let _ = writeln!(stderr, "{}", e.to_json());
            e.exit_code()
        }
    }
}
