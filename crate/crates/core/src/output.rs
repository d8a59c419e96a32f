//! CSV and SVG emission.
//!
//! CSV files start with `#` comment lines carrying the artifact version and
//! the resolved configuration, followed by a mandatory header row. Numbers
//! use 17 significant digits so every f64 round-trips exactly.

use std::fmt::Write as _;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_f64(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// 17 significant digits in scientific notation.
pub fn format_f64(v: f64) -> String {
    if v == 0.0 {
        // Normalise −0 so identical runs never differ by a sign bit.
        "0.0000000000000000e0".to_string()
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvDocument {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvDocument {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            comments: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column (non-numeric cells become NaN).
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64().unwrap_or(f64::NAN)).collect())
    }

    pub fn render(&self) -> Result<String> {
        let mut out = String::new();
        for c in &self.comments {
            for line in c.lines() {
                out.push_str("# ");
                out.push_str(line);
                out.push('\n');
            }
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| Error::Io(e.to_string()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))?);
        Ok(out)
    }
}

/// One line series of an SVG panel.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub dashed: bool,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub series: Vec<Series>,
}

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const MARGIN: f64 = 40.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Self-contained SVG with panels laid out left to right.
///
/// Polyline points are written in data coordinates (the same numbers as the
/// CSV rows) and mapped into each panel by a `matrix` transform.
pub fn render_svg(panels: &[Panel]) -> String {
    let width = PANEL_W * panels.len().max(1) as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{PANEL_H}" viewBox="0 0 {width} {PANEL_H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{width}" height="{PANEL_H}" fill="white"/>"#);
    for (k, panel) in panels.iter().enumerate() {
        let ox = k as f64 * PANEL_W;
        let (mut xmin, mut xmax, mut ymin, mut ymax) =
            (f64::INFINITY, f64::NEG_INFINITY, 0.0f64, f64::NEG_INFINITY);
        for ser in &panel.series {
            for (&x, &y) in ser.x.iter().zip(&ser.y) {
                xmin = xmin.min(x);
                xmax = xmax.max(x);
                ymin = ymin.min(y);
                ymax = ymax.max(y);
            }
        }
        if !(xmax > xmin) {
            xmax = xmin + 1.0;
        }
        if !(ymax > ymin) {
            ymax = ymin + 1.0;
        }
        let (pw, ph) = (PANEL_W - 2.0 * MARGIN, PANEL_H - 2.0 * MARGIN);
        let sx = pw / (xmax - xmin);
        let sy = -ph / (ymax - ymin);
        let tx = ox + MARGIN - xmin * sx;
        let ty = PANEL_H - MARGIN - ymin * sy;
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#,
            ox + MARGIN
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            ox + MARGIN,
            MARGIN - 8.0,
            escape(&panel.title)
        );
        for ser in &panel.series {
            let pts: Vec<String> = ser
                .x
                .iter()
                .zip(&ser.y)
                .map(|(x, y)| format!("{},{}", format_f64(*x), format_f64(*y)))
                .collect();
            let dash = if ser.dashed { r#" stroke-dasharray="6 4""# } else { "" };
            let _ = writeln!(
                s,
                r#"<polyline data-label="{}" transform="matrix({sx:e} 0 0 {sy:e} {tx:e} {ty:e})" fill="none" stroke="black" stroke-width="1.2" vector-effect="non-scaling-stroke"{dash} points="{}"/>"#,
                escape(&ser.label),
                pts.join(" ")
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, f64::MIN_POSITIVE] {
            let s = format_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_f64(-0.0), format_f64(0.0));
    }

    #[test]
    fn csv_layout() {
        let mut doc = CsvDocument::new(&["t", "axis"]);
        doc.comments.push("mzbath 0.1.0\nline two".into());
        doc.push(vec![Cell::Num(1.5), Cell::from("X")]);
        let text = doc.render().unwrap();
        let mut lines = text.split('\n');
        assert_eq!(lines.next(), Some("# mzbath 0.1.0"));
        assert_eq!(lines.next(), Some("# line two"));
        assert_eq!(lines.next(), Some("t,axis\r"));
        assert_eq!(lines.next(), Some("1.5000000000000000e0,X\r"));
    }

    #[test]
    fn svg_is_self_contained() {
        let svg = render_svg(&[Panel {
            title: "P <t=0>".into(),
            series: vec![Series {
                label: "phi=0".into(),
                x: vec![0.0, 1.0],
                y: vec![0.5, 0.25],
                dashed: true,
            }],
        }]);
        assert!(!svg.contains("href"));
        assert!(svg.contains("&lt;t=0&gt;"));
        assert!(svg.contains("0.0000000000000000e0,5.0000000000000000e-1"));
    }
}
