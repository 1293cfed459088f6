//! Result tables and their CSV, JSON and SVG renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::config::Format;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Num(x) => write!(f, "{x}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}
impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}
impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}
impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}
impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

/// How a table maps onto a line plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotHint {
    pub x: usize,
    pub y: Vec<usize>,
    /// Column whose distinct values split rows into separate lines.
    pub group: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub plot: PlotHint,
}

impl Table {
    pub fn new(name: &str, columns: &[&str], plot: PlotHint) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: vec![], plot }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|c| c.to_string())).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table is always serialisable")
    }

    /// Polyline plot of the `plot` columns; plain text, no dependencies.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 420.0;
        const PAD: f64 = 60.0;
        let mut lines: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
        for row in &self.rows {
            let Some(x) = row[self.plot.x].as_f64() else { continue };
            let tag = self.plot.group.map(|g| row[g].to_string());
            for &yi in &self.plot.y {
                if let Some(y) = row[yi].as_f64() {
                    let key = match &tag {
                        Some(t) => format!("{}={} {}", self.columns[self.plot.group.unwrap()], t, self.columns[yi]),
                        None => self.columns[yi].clone(),
                    };
                    lines.entry(key).or_default().push((x, y));
                }
            }
        }
        let pts = lines.values().flatten();
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 == x0 {
            x1 = x0 + 1.0;
        }
        if y1 == y0 {
            y1 = y0 + 1.0;
        }
        let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
        let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
        let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"];

        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">"#);
        let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, self.name);
        let _ = writeln!(
            s,
            r#"<path d="M{PAD} {} H{} M{PAD} {} V{PAD}" stroke="black" fill="none"/>"#,
            H - PAD,
            W - PAD,
            H - PAD
        );
        let _ = writeln!(s, r#"<text x="{PAD}" y="{}">{x0:.4}</text>"#, H - PAD + 15.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{x1:.4}</text>"#, W - PAD, H - PAD + 15.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{y0:.4}</text>"#, PAD - 4.0, H - PAD);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{y1:.4}</text>"#, PAD - 4.0, PAD + 4.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 20.0, self.columns[self.plot.x]);
        for (i, (label, pts)) in lines.iter().enumerate() {
            let colour = palette[i % palette.len()];
            let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{colour}" points="{}"/>"#, coords.join(" "));
            let _ = writeln!(s, r#"<text x="{}" y="{}" fill="{colour}">{label}</text>"#, W - PAD + 4.0 - 150.0, PAD + 14.0 * i as f64);
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Everything one scenario run produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenario: String,
    pub resolved: BTreeMap<String, serde_json::Value>,
    pub tables: Vec<Table>,
}

impl ScenarioResult {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

#[derive(Serialize)]
struct Metadata<'a> {
    scenario: &'a str,
    version: &'a str,
    /// Wall-clock seconds since the epoch; the only non-reproducible field.
    timestamp: u64,
    config: &'a serde_json::Value,
    resolved: &'a BTreeMap<String, serde_json::Value>,
    files: Vec<String>,
}

/// Writes one file per table and format plus `metadata.json`.
pub fn write_outputs(
    result: &ScenarioResult,
    config: &crate::harness::config::ExperimentConfig,
    dir: &Path,
    formats: &[Format],
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut fmts = formats.to_vec();
    fmts.sort();
    fmts.dedup();
    for t in &result.tables {
        for f in &fmts {
            let (ext, body) = match f {
                Format::Csv => ("csv", t.to_csv()?),
                Format::Json => ("json", t.to_json()),
                Format::Svg => ("svg", t.to_svg()),
            };
            let path = dir.join(format!("{}.{ext}", t.name));
            std::fs::write(&path, body)?;
            written.push(path);
        }
    }
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let config_json = serde_json::to_value(config).map_err(|e| Error::Io(e.to_string()))?;
    let meta = Metadata {
        scenario: &result.scenario,
        version: env!("CARGO_PKG_VERSION"),
        timestamp,
        config: &config_json,
        resolved: &result.resolved,
        files: written.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).collect(),
    };
    let path = dir.join("metadata.json");
    std::fs::write(&path, serde_json::to_string_pretty(&meta).map_err(|e| Error::Io(e.to_string()))?)?;
    written.push(path);
    Ok(written)
}
