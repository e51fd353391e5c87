//! File formats: interface curves, trajectories, phase-field snapshots,
//! CSV tables with metadata headers, and JSON checker reports.
//!
//! All text output uses `,` separators in CSV, `.` decimals and LF line
//! endings; files are written atomically (temp file + rename).

use contactflow_core::calibration::CheckReport;
use contactflow_core::geometry::InterfaceCurve;
use contactflow_core::mesh::DiskMesh;
use contactflow_core::phase_field::PhaseState;
use contactflow_core::Vec2;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Curve format: header `# t=<time>`, one `x y` pair per line.
pub fn curve_to_string(curve: &InterfaceCurve) -> String {
    let mut out = format!("# t={}\n", curve.time);
    for p in &curve.nodes {
        out.push_str(&format!("{} {}\n", p.x, p.y));
    }
    out
}

pub fn write_curve(path: &Path, curve: &InterfaceCurve) -> std::io::Result<()> {
    write_atomic(path, &curve_to_string(curve))
}

pub fn parse_curve(text: &str) -> Result<InterfaceCurve, String> {
    let mut time = 0.0;
    let mut nodes = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            for part in rest.split_whitespace() {
                if let Some(v) = part.strip_prefix("t=") {
                    time = v.parse().map_err(|_| format!("line {}: bad time {v:?}", idx + 1))?;
                }
            }
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(xs), Some(ys)) = (it.next(), it.next()) else {
            return Err(format!("line {}: expected `x y`", idx + 1));
        };
        let x: f64 = xs.parse().map_err(|_| format!("line {}: bad x {xs:?}", idx + 1))?;
        let y: f64 = ys.parse().map_err(|_| format!("line {}: bad y {ys:?}", idx + 1))?;
        nodes.push(Vec2::new(x, y));
    }
    if nodes.len() < 4 {
        return Err("curve needs at least 4 nodes".to_string());
    }
    Ok(InterfaceCurve::new(nodes, time))
}

pub fn read_curve(path: &Path) -> Result<InterfaceCurve, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_curve(&text)
}

/// Trajectory export: per-time curve files plus an index of `t filename`.
pub fn write_trajectory(dir: &Path, curves: &[InterfaceCurve]) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut index = String::new();
    let mut paths = Vec::new();
    for (k, c) in curves.iter().enumerate() {
        let name = format!("curve_{k:05}.txt");
        let path = dir.join(&name);
        write_curve(&path, c)?;
        index.push_str(&format!("{} {}\n", c.time, name));
        paths.push(path);
    }
    write_atomic(&dir.join("index.txt"), &index)?;
    Ok(paths)
}

/// Snapshot format: header `# t=<t> eps=<eps>`, one `x y u` triple per line.
pub fn snapshot_to_string(mesh: &DiskMesh, state: &PhaseState) -> String {
    let mut out = format!("# t={} eps={}\n", state.time, state.eps);
    for (p, u) in mesh.nodes.iter().zip(&state.u) {
        out.push_str(&format!("{} {} {}\n", p.x, p.y, u));
    }
    out
}

pub fn write_snapshot(path: &Path, mesh: &DiskMesh, state: &PhaseState) -> std::io::Result<()> {
    write_atomic(path, &snapshot_to_string(mesh, state))
}

/// CSV with `# key: value` metadata lines before the header row.
pub struct CsvTable {
    metadata: Vec<(String, String)>,
    header: String,
    rows: Vec<String>,
}

impl CsvTable {
    pub fn new(header: &str) -> CsvTable {
        CsvTable {
            metadata: Vec::new(),
            header: header.to_string(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    pub fn row(&mut self, cells: &[f64]) -> &mut Self {
        let joined: Vec<String> = cells.iter().map(|v| format!("{v}")).collect();
        self.rows.push(joined.join(","));
        self
    }

    pub fn row_raw(&mut self, raw: String) -> &mut Self {
        self.rows.push(raw);
        self
    }

    pub fn to_string(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&self.header);
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        write_atomic(path, &self.to_string())
    }
}

/// Checker report as JSON: `{condition: {max_ratio, worst_point, samples}}`.
pub fn check_report_json(report: &CheckReport) -> serde_json::Value {
    let mut conditions = serde_json::Map::new();
    for c in report.ratios.iter().chain(report.equalities.iter()) {
        conditions.insert(
            c.name.to_string(),
            serde_json::json!({
                "max_ratio": c.value,
                "worst_point": [c.worst.x, c.worst.y],
                "samples": c.samples,
            }),
        );
    }
    serde_json::json!({
        "conditions": conditions,
        "fitted_c": report.fitted_c,
        "hard_failures": report.hard_failures,
        "total_samples": report.total_samples,
    })
}
