//! Small helpers shared by the figure renderers.

use std::fmt::Write;

pub const PALETTE: [&str; 6] = ["#1b6ca8", "#d1495b", "#2e933c", "#edae49", "#6a4c93", "#00798c"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    Circle,
    Square,
    Triangle,
    Diamond,
    Cross,
    Star,
}

impl Marker {
    pub fn for_group(index: usize) -> Marker {
        const ALL: [Marker; 6] =
            [Marker::Circle, Marker::Square, Marker::Triangle, Marker::Diamond, Marker::Cross, Marker::Star];
        ALL[index % ALL.len()]
    }

    pub fn name(self) -> &'static str {
        match self {
            Marker::Circle => "circle",
            Marker::Square => "square",
            Marker::Triangle => "triangle",
            Marker::Diamond => "diamond",
            Marker::Cross => "cross",
            Marker::Star => "star",
        }
    }

    /// SVG element for a marker of radius `r` centred on `(x, y)`.
    pub fn draw(self, out: &mut String, x: f64, y: f64, r: f64, color: &str, extra: &str) {
        let poly = |pts: &[(f64, f64)]| {
            pts.iter().map(|(dx, dy)| format!("{},{}", num(x + dx * r), num(y + dy * r))).collect::<Vec<_>>().join(" ")
        };
        let _ = match self {
            Marker::Circle => writeln!(
                out,
                r#"<circle cx="{}" cy="{}" r="{}" fill="{color}"{extra}/>"#,
                num(x),
                num(y),
                num(r)
            ),
            Marker::Square => writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{color}"{extra}/>"#,
                num(x - r),
                num(y - r),
                num(2.0 * r),
                num(2.0 * r)
            ),
            Marker::Triangle => writeln!(
                out,
                r#"<polygon points="{}" fill="{color}"{extra}/>"#,
                poly(&[(0.0, -1.2), (1.1, 0.8), (-1.1, 0.8)])
            ),
            Marker::Diamond => writeln!(
                out,
                r#"<polygon points="{}" fill="{color}"{extra}/>"#,
                poly(&[(0.0, -1.3), (1.1, 0.0), (0.0, 1.3), (-1.1, 0.0)])
            ),
            Marker::Cross => writeln!(
                out,
                r#"<path d="M{} {}L{} {}M{} {}L{} {}" stroke="{color}" stroke-width="2.5" fill="none"{extra}/>"#,
                num(x - r),
                num(y - r),
                num(x + r),
                num(y + r),
                num(x - r),
                num(y + r),
                num(x + r),
                num(y - r)
            ),
            Marker::Star => {
                let pts: Vec<(f64, f64)> = (0..10)
                    .map(|k| {
                        let a = std::f64::consts::PI * (k as f64) / 5.0 - std::f64::consts::FRAC_PI_2;
                        let len = if k % 2 == 0 { 1.4 } else { 0.6 };
                        (len * a.cos(), len * a.sin())
                    })
                    .collect();
                writeln!(out, r#"<polygon points="{}" fill="{color}"{extra}/>"#, poly(&pts))
            }
        };
    }
}

/// Fixed two-decimal coordinate; `-0.00` is written as `0.00`.
pub fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

pub fn header(out: &mut String, width: u32, height: u32, title: &str) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="Helvetica, Arial, sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
}

/// Readable eigenvalue or loading value for labels.
pub fn short(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-3 {
        format!("{v:.3e}")
    } else {
        format!("{v:.4}")
    }
}
