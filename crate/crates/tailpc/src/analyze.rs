//! The full-sample pipeline plus optional rolling windows, written to an
//! output directory.

use std::path::PathBuf;

use rayon::prelude::*;
use tailpc_core::detector::{detect_window, scanned_ranks, window_starts};
use tailpc_core::{compute_returns, correlation, detect, eigendecompose, DetectorConfig, WindowDetection};

use crate::error::{Error, Result};
use crate::ingest;
use crate::manifest::{self, FileDigest, RunManifest, WindowParams};
use crate::report::{self, DetectionReport, DroppedTicker, RollingReport, Universe};

pub const DETECTION_JSON: &str = "detection.json";
pub const GROUPS_CSV: &str = "groups.csv";
pub const EIGEN_TAIL_CSV: &str = "eigen_tail.csv";
pub const ROLLING_JSON: &str = "rolling.json";
pub const ROLLING_CSV: &str = "rolling.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeOptions {
    pub prices: PathBuf,
    pub dividends: Option<PathBuf>,
    pub out: PathBuf,
    pub config: DetectorConfig,
    pub window: Option<WindowParams>,
    /// Worker threads for rolling windows; `None` uses rayon's default.
    pub threads: Option<usize>,
    pub rescale_tracks: bool,
    /// Also write adjusted prices, returns, the correlation matrix and all
    /// eigenvalues.
    pub audit: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeOutcome {
    pub report: DetectionReport,
    pub rolling: Option<RollingReport>,
    /// Written files, manifest last.
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

pub fn run_analyze(opts: &AnalyzeOptions) -> Result<AnalyzeOutcome> {
    let started = manifest::now();
    let cfg = &opts.config;
    cfg.validate()?;
    if let Some(w) = opts.window {
        if w.step == 0 {
            return Err(Error::Config("step must be at least 1".into()));
        }
    }
    if opts.threads == Some(0) {
        return Err(Error::Config("threads must be at least 1".into()));
    }

    let mut panel = ingest::read_prices(&opts.prices)?;
    if let Some(d) = &opts.dividends {
        panel = ingest::read_dividends(d, &panel)?;
    }
    let tickers_in = panel.n_tickers();
    let filtered = panel.filter_complete()?;
    let mut warnings: Vec<String> = filtered
        .dropped
        .iter()
        .map(|d| format!("dropped {}: missing {} of {} days", d.ticker, d.missing_days, panel.n_dates()))
        .collect();
    if filtered.panel.n_tickers() < 2 {
        return Err(Error::Data(format!(
            "{} ticker(s) with a complete price history; at least 2 are needed",
            filtered.panel.n_tickers()
        )));
    }
    let rp = compute_returns(&filtered.panel)?;
    let cm = correlation(&rp)?;
    let ed = eigendecompose(&cm)?;
    let scanned = scanned_ranks(&ed, cfg)?;
    let groups = detect(&ed, cfg)?;

    let report = DetectionReport {
        tool: crate::TOOL.into(),
        version: crate::VERSION.into(),
        config: cfg.clone(),
        universe: Universe {
            tickers_in,
            tickers: rp.n_tickers(),
            price_dates: rp.price_dates().len(),
            returns: rp.n_returns(),
            dropped: filtered
                .dropped
                .iter()
                .map(|d| DroppedTicker { ticker: d.ticker.clone(), missing_days: d.missing_days })
                .collect(),
        },
        scanned_pcs: scanned.clone(),
        eigen_tail: report::eigen_table(&ed, scanned.len().max(1))?,
        groups: report::number_groups(&groups),
    };

    let rolling = match opts.window {
        None => None,
        Some(w) => {
            let windows = rolling(&rp, w, cfg, opts.threads)?;
            for win in windows.iter().filter(|w| w.rank_deficient) {
                warnings.push(format!(
                    "window starting {} has {} observations for {} assets; its correlation matrix is singular",
                    win.start_date, win.observations, win.assets
                ));
            }
            for win in windows.iter().filter(|w| !w.dropped.is_empty()) {
                warnings.push(format!("window starting {} dropped flat series {}", win.start_date, win.dropped.join(", ")));
            }
            Some(RollingReport {
                tool: crate::TOOL.into(),
                version: crate::VERSION.into(),
                config: cfg.clone(),
                window: w.window,
                step: w.step,
                windows,
            })
        }
    };

    let out = &opts.out;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut files = Vec::new();
    let mut put = |name: String, text: String| -> Result<()> {
        let path = out.join(name);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        files.push(path);
        Ok(())
    };
    put(DETECTION_JSON.into(), report.to_json())?;
    put(GROUPS_CSV.into(), report.flat_csv())?;
    put(EIGEN_TAIL_CSV.into(), report::eigen_csv(&report.eigen_tail))?;
    let mut ascending = scanned.clone();
    ascending.sort_unstable();
    for pair in ascending.windows(2).filter(|w| w[1] == w[0] + 1) {
        let sheet = report::biplot(&ed, pair[0], pair[1], &groups)?;
        put(sheet.file_name(), sheet.to_svg())?;
    }
    for ng in &report.groups {
        let sheet = report::price_tracks(&rp, &ng.group, ng.id, opts.rescale_tracks)?;
        put(sheet.csv_name(), sheet.to_csv())?;
        put(sheet.svg_name(), sheet.to_svg())?;
    }
    if let Some(r) = &rolling {
        put(ROLLING_JSON.into(), r.to_json())?;
        put(ROLLING_CSV.into(), r.to_csv())?;
    }
    if opts.audit {
        put("adjusted_prices.csv".into(), report::adjusted_prices_csv(&rp))?;
        put("returns.csv".into(), report::returns_csv(&rp))?;
        put("correlation.csv".into(), report::correlation_csv(&cm))?;
        put("eigenvalues.csv".into(), report::eigenvalues_csv(&ed))?;
    }

    let mut m = RunManifest::new("analyze", started);
    m.inputs.push(FileDigest::of(&opts.prices)?);
    if let Some(d) = &opts.dividends {
        m.inputs.push(FileDigest::of(d)?);
    }
    m.detector_config = Some(cfg.clone());
    m.window = opts.window;
    m.threads = opts.threads;
    files.push(m.finish(out, &files)?);

    Ok(AnalyzeOutcome { report, rolling, files, warnings })
}

/// Rolling detection with windows evaluated in parallel; results keep window order.
pub fn rolling(
    rp: &tailpc_core::ReturnPanel,
    w: WindowParams,
    cfg: &DetectorConfig,
    threads: Option<usize>,
) -> Result<Vec<WindowDetection>> {
    cfg.validate()?;
    let starts = window_starts(rp.n_returns(), w.window, w.step)?;
    let work = || -> Result<Vec<WindowDetection>> {
        starts
            .par_iter()
            .map(|&s| detect_window(rp, s, w.window, cfg).map_err(Error::from))
            .collect()
    };
    match threads {
        None => work(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}")))?
            .install(work),
    }
}

