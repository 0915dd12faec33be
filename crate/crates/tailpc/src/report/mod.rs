//! Tables, figures and the detection report.

mod biplot;
pub mod svg;
mod tracks;

pub use biplot::{biplot, BiplotPoint, BiplotSheet};
pub use tracks::{price_tracks, TrackSheet};

use serde::Serialize;
use tailpc_core::{CorrelationMatrix, DetectorConfig, EigenDecomposition, RelationshipGroup, ReturnPanel, WindowDetection};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenRow {
    pub rank: usize,
    pub eigenvalue: f64,
}

/// The `last_k` smallest eigenvalues, smallest first.
pub fn eigen_table(ed: &EigenDecomposition, last_k: usize) -> Result<Vec<EigenRow>> {
    let p = ed.dim();
    if last_k == 0 || last_k > p {
        return Err(Error::Config(format!("eigen table size {last_k} outside 1..={p}")));
    }
    Ok((p + 1 - last_k..=p).rev().map(|rank| EigenRow { rank, eigenvalue: ed.eigenvalue(rank) }).collect())
}

fn csv_string(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// `rank,eigenvalue` rows in the given order.
pub fn eigen_csv(rows: &[EigenRow]) -> String {
    csv_string(|w| {
        w.write_record(["rank", "eigenvalue"])?;
        for r in rows {
            w.write_record([r.rank.to_string(), r.eigenvalue.to_string()])?;
        }
        Ok(())
    })
}

/// A ticker removed before analysis for missing prices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DroppedTicker {
    pub ticker: String,
    pub missing_days: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Universe {
    pub tickers_in: usize,
    pub tickers: usize,
    pub price_dates: usize,
    pub returns: usize,
    pub dropped: Vec<DroppedTicker>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumberedGroup {
    pub id: usize,
    #[serde(flatten)]
    pub group: RelationshipGroup,
}

pub fn number_groups(groups: &[RelationshipGroup]) -> Vec<NumberedGroup> {
    groups.iter().enumerate().map(|(i, g)| NumberedGroup { id: i + 1, group: g.clone() }).collect()
}

/// Full-sample detection result as written to `detection.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionReport {
    pub tool: String,
    pub version: String,
    pub config: DetectorConfig,
    pub universe: Universe,
    pub scanned_pcs: Vec<usize>,
    pub eigen_tail: Vec<EigenRow>,
    pub groups: Vec<NumberedGroup>,
}

impl DetectionReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// `group_id,ticker,pc_rank,loading,eigenvalue`, one row per member and
    /// detecting component.
    pub fn flat_csv(&self) -> String {
        flat_csv(&self.groups)
    }
}

pub fn flat_csv(groups: &[NumberedGroup]) -> String {
    csv_string(|w| {
        w.write_record(["group_id", "ticker", "pc_rank", "loading", "eigenvalue"])?;
        for ng in groups {
            let g = &ng.group;
            for (m, ticker) in g.members.iter().enumerate() {
                for (k, rank) in g.detecting_pcs.iter().enumerate() {
                    w.write_record([
                        ng.id.to_string(),
                        ticker.clone(),
                        rank.to_string(),
                        g.loadings[m][k].to_string(),
                        g.eigenvalues[k].to_string(),
                    ])?;
                }
            }
        }
        Ok(())
    })
}

/// Rolling-window result as written to `rolling.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RollingReport {
    pub tool: String,
    pub version: String,
    pub config: DetectorConfig,
    pub window: usize,
    pub step: usize,
    pub windows: Vec<WindowDetection>,
}

impl RollingReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// `window_start,window_end,group,ticker` with one row per member of each
    /// window's groups; groups are numbered within their window.
    pub fn to_csv(&self) -> String {
        csv_string(|w| {
            w.write_record(["window_start", "window_end", "group", "ticker"])?;
            for win in &self.windows {
                for (g, group) in win.groups.iter().enumerate() {
                    for m in &group.members {
                        w.write_record([
                            win.start_date.to_string(),
                            win.end_date.to_string(),
                            (g + 1).to_string(),
                            m.clone(),
                        ])?;
                    }
                }
            }
            Ok(())
        })
    }
}

/// `date,ticker,pnew` over every price date.
pub fn adjusted_prices_csv(rp: &ReturnPanel) -> String {
    csv_string(|w| {
        w.write_record(["date", "ticker", "pnew"])?;
        for (i, t) in rp.tickers().iter().enumerate() {
            for (d, v) in rp.price_dates().iter().zip(rp.adjusted_prices(i)) {
                w.write_record([d.to_string(), t.clone(), v.to_string()])?;
            }
        }
        Ok(())
    })
}

/// `date,ticker,return`, each return labelled with its start date.
pub fn returns_csv(rp: &ReturnPanel) -> String {
    csv_string(|w| {
        w.write_record(["date", "ticker", "return"])?;
        for (i, t) in rp.tickers().iter().enumerate() {
            for (d, v) in rp.dates().iter().zip(rp.series(i)) {
                w.write_record([d.to_string(), t.clone(), v.to_string()])?;
            }
        }
        Ok(())
    })
}

/// Square matrix with a `ticker` header column.
pub fn correlation_csv(cm: &CorrelationMatrix) -> String {
    csv_string(|w| {
        let mut head = vec!["ticker".to_string()];
        head.extend(cm.tickers().iter().cloned());
        w.write_record(&head)?;
        for (i, t) in cm.tickers().iter().enumerate() {
            let mut row = vec![t.clone()];
            row.extend((0..cm.dim()).map(|j| cm.get(i, j).to_string()));
            w.write_record(&row)?;
        }
        Ok(())
    })
}

/// All eigenvalues, largest first.
pub fn eigenvalues_csv(ed: &EigenDecomposition) -> String {
    let rows: Vec<EigenRow> = (1..=ed.dim()).map(|rank| EigenRow { rank, eigenvalue: ed.eigenvalue(rank) }).collect();
    eigen_csv(&rows)
}
