//! CSV tables with an embedded-config header, and a small SVG emitter.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

pub const FORMAT_VERSION: &str = "1";

/// A column-major numeric table. `None` cells are written empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    /// Extra `# key: value` lines after the config block.
    pub notes: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Header block, column names, then one line per row. Floats use Rust's
    /// shortest round-trip formatting, so output is byte-stable.
    pub fn to_csv(&self, command: &str, config: &BTreeMap<String, String>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# format-version {FORMAT_VERSION}");
        let _ = writeln!(out, "# command {command}");
        for (k, v) in config {
            let _ = writeln!(out, "# config {k}={v}");
        }
        for (k, v) in &self.notes {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.map(fmt_float).unwrap_or_default()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Shortest round-trip digits; exponent form outside [1e-5, 1e16).
pub fn fmt_float(x: f64) -> String {
    let a = x.abs();
    if x.is_nan() {
        String::new()
    } else if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn extent(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > hi {
        return None;
    }
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        return Some((lo - pad, hi + pad));
    }
    Some((lo, hi))
}

/// Line plot of several y series against one x series.
pub fn line_svg(title: &str, x: &[f64], series: &[(&str, Vec<Option<f64>>)]) -> String {
    let xr = extent(x.iter().copied()).unwrap_or((0.0, 1.0));
    let yr = extent(series.iter().flat_map(|(_, ys)| ys.iter().flatten().copied())).unwrap_or((0.0, 1.0));
    let px = |v: f64| MARGIN + (v - xr.0) / (xr.1 - xr.0) * (WIDTH - 2.0 * MARGIN);
    let py = |v: f64| HEIGHT - MARGIN - (v - yr.0) / (yr.1 - yr.0) * (HEIGHT - 2.0 * MARGIN);
    let mut s = svg_open(title);
    let _ = writeln!(
        s,
        r#"<rect x="{m}" y="{m}" width="{w}" height="{h}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        w = WIDTH - 2.0 * MARGIN,
        h = HEIGHT - 2.0 * MARGIN
    );
    axis_labels(&mut s, xr, yr);
    for (k, (name, ys)) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        // Gaps split the polyline.
        let mut seg: Vec<String> = Vec::new();
        let flush = |seg: &mut Vec<String>, s: &mut String| {
            if seg.len() > 1 {
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                    seg.join(" ")
                );
            }
            seg.clear();
        };
        for (xi, yi) in x.iter().zip(ys.iter()) {
            match yi {
                Some(y) if y.is_finite() => seg.push(format!("{:.2},{:.2}", px(*xi), py(*y))),
                _ => flush(&mut seg, &mut s),
            }
        }
        flush(&mut seg, &mut s);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" fill="{colour}">{}</text>"#,
            WIDTH - MARGIN - 120.0,
            MARGIN + 16.0 * (k as f64 + 1.0),
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Heatmap of values[j][i] over (x[i], y[j]) on a blue-white-red scale
/// symmetric about zero.
pub fn heatmap_svg(title: &str, x: &[f64], y: &[f64], values: &[Vec<f64>]) -> String {
    let xr = extent(x.iter().copied()).unwrap_or((0.0, 1.0));
    let yr = extent(y.iter().copied()).unwrap_or((0.0, 1.0));
    let vmax = values
        .iter()
        .flatten()
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let nx = x.len().max(1) as f64;
    let ny = y.len().max(1) as f64;
    let cw = (WIDTH - 2.0 * MARGIN) / nx;
    let ch = (HEIGHT - 2.0 * MARGIN) / ny;
    let mut s = svg_open(title);
    for (j, row) in values.iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            let t = if v.is_finite() { (v / vmax).clamp(-1.0, 1.0) } else { 0.0 };
            let (r, g, b) = if t >= 0.0 {
                (255.0, 255.0 * (1.0 - t), 255.0 * (1.0 - t))
            } else {
                (255.0 * (1.0 + t), 255.0 * (1.0 + t), 255.0)
            };
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({},{},{})"/>"#,
                MARGIN + i as f64 * cw,
                HEIGHT - MARGIN - (j as f64 + 1.0) * ch,
                cw + 0.05,
                ch + 0.05,
                r as u8,
                g as u8,
                b as u8
            );
        }
    }
    axis_labels(&mut s, xr, yr);
    s.push_str("</svg>\n");
    s
}

fn svg_open(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="30" font-size="14" font-family="sans-serif">{}</text>"#,
        escape(title)
    );
    s
}

fn axis_labels(s: &mut String, xr: (f64, f64), yr: (f64, f64)) {
    let fmt = |v: f64| format!("{v:.3e}");
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="{:.1}" font-size="10">{}</text><text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{}</text>"#,
        HEIGHT - MARGIN + 14.0,
        fmt(xr.0),
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 14.0,
        fmt(xr.1)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{}</text><text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{}</text>"#,
        MARGIN - 4.0,
        HEIGHT - MARGIN,
        fmt(yr.0),
        MARGIN - 4.0,
        MARGIN + 10.0,
        fmt(yr.1)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["t", "f"]);
        t.push(vec![Some(0.1), None]);
        t.push(vec![Some(2.0), Some(1e-300)]);
        t.note("bound_state", "absent");
        let mut cfg = BTreeMap::new();
        cfg.insert("a.b".to_string(), "1".to_string());
        let csv = t.to_csv("qfi", &cfg);
        assert_eq!(
            csv,
            "# format-version 1\n# command qfi\n# config a.b=1\n# bound_state: absent\nt,f\n0.1,\n2,1e-300\n"
        );
    }

    #[test]
    fn shortest_round_trip() {
        for &x in &[0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-17, 1.1102230246251565e-16, 12345.678] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn svg_is_well_formed() {
        let s = line_svg("u", &[0.0, 1.0, 2.0], &[("a", vec![Some(1.0), None, Some(3.0)])]);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        let h = heatmap_svg("d", &[0.0, 1.0], &[0.0], &[vec![-1.0, 2.0]]);
        assert_eq!(h.matches("<rect").count(), 2);
    }
}
