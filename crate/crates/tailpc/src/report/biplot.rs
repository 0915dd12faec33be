use std::fmt::Write;

use serde::Serialize;
use tailpc_core::{EigenDecomposition, RelationshipGroup};

use super::svg::{self, escape, num, Marker, PALETTE};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiplotPoint {
    pub ticker: String,
    pub x: f64,
    pub y: f64,
    /// 0-based index into the groups passed to [`biplot`].
    pub group: Option<usize>,
}

/// Loadings of every ticker on two components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiplotSheet {
    pub pc_a: usize,
    pub pc_b: usize,
    pub eigenvalue_a: f64,
    pub eigenvalue_b: f64,
    pub points: Vec<BiplotPoint>,
    /// Member lists of the highlighted groups, in group order.
    pub groups: Vec<Vec<String>>,
}

pub fn biplot(
    ed: &EigenDecomposition,
    pc_a: usize,
    pc_b: usize,
    groups: &[RelationshipGroup],
) -> Result<BiplotSheet> {
    let p = ed.dim();
    for rank in [pc_a, pc_b] {
        if rank == 0 || rank > p {
            return Err(Error::Config(format!("component rank {rank} outside 1..={p}")));
        }
    }
    if pc_a == pc_b {
        return Err(Error::Config("biplot needs two different components".into()));
    }
    let group_of = |ticker: &str| groups.iter().position(|g| g.contains(ticker));
    let points = ed
        .tickers()
        .iter()
        .enumerate()
        .map(|(i, t)| BiplotPoint {
            ticker: t.clone(),
            x: ed.loadings(pc_a)[i],
            y: ed.loadings(pc_b)[i],
            group: group_of(t),
        })
        .collect();
    Ok(BiplotSheet {
        pc_a,
        pc_b,
        eigenvalue_a: ed.eigenvalue(pc_a),
        eigenvalue_b: ed.eigenvalue(pc_b),
        points,
        groups: groups.iter().map(|g| g.members.clone()).collect(),
    })
}

const SIZE: f64 = 640.0;
const MARGIN: f64 = 70.0;

impl BiplotSheet {
    pub fn axis_label(rank: usize, eigenvalue: f64) -> String {
        format!("PC {rank} (λ = {})", svg::short(eigenvalue))
    }

    pub fn file_name(&self) -> String {
        format!("biplot_pc{}_pc{}.svg", self.pc_a, self.pc_b)
    }

    /// Scatter of the loadings. Points carry their exact loadings in
    /// `data-x` / `data-y`; group members are drawn with their group's marker
    /// and labelled.
    pub fn to_svg(&self) -> String {
        let extent = self
            .points
            .iter()
            .fold(0.0_f64, |m, p| m.max(p.x.abs()).max(p.y.abs()))
            .max(0.1)
            * 1.1;
        let span = SIZE - 2.0 * MARGIN;
        let px = |v: f64| MARGIN + (v + extent) / (2.0 * extent) * span;
        let py = |v: f64| SIZE - MARGIN - (v + extent) / (2.0 * extent) * span;

        let mut out = String::new();
        let title = format!("Loadings on PC {} and PC {}", self.pc_a, self.pc_b);
        svg::header(&mut out, SIZE as u32, SIZE as u32, &title);
        let _ = writeln!(
            out,
            r##"<rect x="{m}" y="{m}" width="{s}" height="{s}" fill="none" stroke="#444"/>"##,
            m = num(MARGIN),
            s = num(span)
        );
        let (x0, y0) = (px(0.0), py(0.0));
        let _ = writeln!(
            out,
            r##"<path d="M{} {}L{} {}M{} {}L{} {}" stroke="#bbb" stroke-dasharray="4 3"/>"##,
            num(MARGIN),
            num(y0),
            num(SIZE - MARGIN),
            num(y0),
            num(x0),
            num(MARGIN),
            num(x0),
            num(SIZE - MARGIN)
        );
        for v in [-extent / 1.1, extent / 1.1] {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="middle" font-size="10">{}</text>"#,
                num(px(v)),
                num(SIZE - MARGIN + 14.0),
                svg::short(v)
            );
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="end" font-size="10">{}</text>"#,
                num(MARGIN - 6.0),
                num(py(v) + 3.0),
                svg::short(v)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            num(SIZE / 2.0),
            num(SIZE - 22.0),
            escape(&Self::axis_label(self.pc_a, self.eigenvalue_a))
        );
        let _ = writeln!(
            out,
            r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
            num(SIZE / 2.0),
            num(SIZE / 2.0),
            escape(&Self::axis_label(self.pc_b, self.eigenvalue_b))
        );
        let _ = writeln!(out, r#"<text x="{}" y="30" text-anchor="middle" font-size="14">{}</text>"#, num(SIZE / 2.0), escape(&title));

        // background first so group members stay on top
        for p in self.points.iter().filter(|p| p.group.is_none()) {
            let data = format!(r#" data-ticker="{}" data-x="{}" data-y="{}""#, escape(&p.ticker), p.x, p.y);
            Marker::Circle.draw(&mut out, px(p.x), py(p.y), 2.5, "#9a9a9a", &data);
        }
        for p in self.points.iter().filter(|p| p.group.is_some()) {
            let g = p.group.unwrap_or(0);
            let color = PALETTE[g % PALETTE.len()];
            let data = format!(
                r#" data-ticker="{}" data-group="{}" data-x="{}" data-y="{}""#,
                escape(&p.ticker),
                g + 1,
                p.x,
                p.y
            );
            Marker::for_group(g).draw(&mut out, px(p.x), py(p.y), 5.0, color, &data);
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
                num(px(p.x) + 8.0),
                num(py(p.y) - 6.0),
                escape(&p.ticker)
            );
        }
        for (g, members) in self.groups.iter().enumerate() {
            let y = MARGIN + 14.0 + 18.0 * g as f64;
            let color = PALETTE[g % PALETTE.len()];
            Marker::for_group(g).draw(&mut out, SIZE - MARGIN - 150.0, y - 4.0, 4.5, color, "");
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}">group {}: {}</text>"#,
                num(SIZE - MARGIN - 140.0),
                num(y),
                g + 1,
                escape(&members.join(", "))
            );
        }
        out.push_str("</svg>\n");
        out
    }
}
