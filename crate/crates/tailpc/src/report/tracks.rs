use std::fmt::Write;

use serde::Serialize;
use tailpc_core::{NaiveDate, RelationshipGroup, ReturnPanel};

use super::svg::{self, escape, num, PALETTE};
use crate::error::{Error, Result};

/// Adjusted prices of a group's members over the whole sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackSheet {
    pub group_id: usize,
    pub members: Vec<String>,
    pub dates: Vec<NaiveDate>,
    /// `series[m][t]`: adjusted price of member `m` on `dates[t]`.
    pub series: Vec<Vec<f64>>,
    /// Give every member its own vertical scale.
    pub rescale: bool,
}

pub fn price_tracks(rp: &ReturnPanel, group: &RelationshipGroup, group_id: usize, rescale: bool) -> Result<TrackSheet> {
    if group.members.len() < 2 {
        return Err(Error::Config("price tracks need a group of at least two members".into()));
    }
    let series = group
        .members
        .iter()
        .map(|m| {
            rp.ticker_index(m)
                .map(|i| rp.adjusted_prices(i).to_vec())
                .ok_or_else(|| Error::Data(format!("group member {m} is not in the return panel")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrackSheet {
        group_id,
        members: group.members.clone(),
        dates: rp.price_dates().to_vec(),
        series,
        rescale,
    })
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 50.0;

fn range(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

impl TrackSheet {
    pub fn csv_name(&self) -> String {
        format!("tracks_group{}.csv", self.group_id)
    }

    pub fn svg_name(&self) -> String {
        format!("tracks_group{}.svg", self.group_id)
    }

    /// `date,<member>...` with one row per date.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut head = vec!["date".to_string()];
        head.extend(self.members.iter().cloned());
        w.write_record(&head).expect("in-memory write");
        for (t, d) in self.dates.iter().enumerate() {
            let mut row = vec![d.to_string()];
            row.extend(self.series.iter().map(|s| s[t].to_string()));
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    /// Line chart of the same values written by [`TrackSheet::to_csv`].
    pub fn to_svg(&self) -> String {
        let n = self.dates.len();
        let plot_w = WIDTH - LEFT - RIGHT;
        let plot_h = HEIGHT - TOP - BOTTOM;
        let all: Vec<f64> = self.series.iter().flatten().copied().collect();
        let shared = range(&all);
        let px = |t: usize| LEFT + if n > 1 { t as f64 / (n - 1) as f64 * plot_w } else { 0.0 };

        let mut out = String::new();
        let title = format!("Group {}: adjusted prices of {}", self.group_id, self.members.join(", "));
        svg::header(&mut out, WIDTH as u32, HEIGHT as u32, &title);
        let _ = writeln!(out, r#"<text x="{}" y="28" text-anchor="middle" font-size="14">{}</text>"#, num(LEFT + plot_w / 2.0), escape(&title));
        let _ = writeln!(
            out,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
            num(LEFT),
            num(TOP),
            num(plot_w),
            num(plot_h)
        );
        if let (Some(first), Some(last)) = (self.dates.first(), self.dates.last()) {
            let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="start" font-size="10">{first}</text>"#, num(LEFT), num(HEIGHT - BOTTOM + 16.0));
            let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end" font-size="10">{last}</text>"#, num(LEFT + plot_w), num(HEIGHT - BOTTOM + 16.0));
        }
        if !self.rescale {
            for v in [shared.0, shared.1] {
                let y = TOP + plot_h - (v - shared.0) / (shared.1 - shared.0) * plot_h;
                let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end" font-size="10">{}</text>"#, num(LEFT - 6.0), num(y + 3.0), svg::short(v));
            }
        }
        let axis = if self.rescale { "adjusted price (own scale per member)" } else { "adjusted price" };
        let _ = writeln!(
            out,
            r#"<text x="20" y="{c}" text-anchor="middle" transform="rotate(-90 20 {c})">{axis}</text>"#,
            c = num(TOP + plot_h / 2.0)
        );

        for (m, s) in self.series.iter().enumerate() {
            let (lo, hi) = if self.rescale { range(s) } else { shared };
            let py = |v: f64| TOP + plot_h - (v - lo) / (hi - lo) * plot_h;
            let color = PALETTE[m % PALETTE.len()];
            let dash = if m % 2 == 1 { r#" stroke-dasharray="6 3""# } else { "" };
            let points: Vec<String> = s.iter().enumerate().map(|(t, &v)| format!("{},{}", num(px(t)), num(py(v)))).collect();
            let _ = writeln!(
                out,
                r#"<polyline data-ticker="{}" points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                escape(&self.members[m]),
                points.join(" ")
            );
            let ly = TOP + 14.0 + 32.0 * m as f64;
            let lx = WIDTH - RIGHT + 14.0;
            let _ = writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="2"{dash}/>"#, num(lx), num(ly - 4.0), num(lx + 22.0), num(ly - 4.0));
            let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, num(lx + 28.0), num(ly), escape(&self.members[m]));
            if self.rescale {
                let _ = writeln!(
                    out,
                    r#"<text x="{}" y="{}" font-size="10">{} to {}</text>"#,
                    num(lx + 28.0),
                    num(ly + 13.0),
                    svg::short(lo),
                    svg::short(hi)
                );
            }
        }
        out.push_str("</svg>\n");
        out
    }
}
