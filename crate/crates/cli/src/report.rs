//! CSV tables and the run manifest.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use crate::error::{Error, Result};

/// Shortest decimal text that parses back to the same `f64`, in exponent
/// form outside [1e-5, 1e16).
pub fn number(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// A numeric column with its unit.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub unit: &'static str,
    pub values: Vec<f64>,
}

impl Column {
    pub fn new(name: impl Into<String>, unit: &'static str, values: Vec<f64>) -> Self {
        Column {
            name: name.into(),
            unit,
            values,
        }
    }

    pub fn header(&self) -> String {
        format!("{} [{}]", self.name, self.unit)
    }
}

/// Renders equal-length columns as CSV with a `name [unit]` header row.
pub fn render_csv(columns: &[Column]) -> String {
    let rows = columns.iter().map(|c| c.values.len()).max().unwrap_or(0);
    let mut out = columns.iter().map(Column::header).collect::<Vec<_>>().join(",");
    out.push('\n');
    for i in 0..rows {
        let cells: Vec<String> = columns
            .iter()
            .map(|c| c.values.get(i).map(|v| number(*v)).unwrap_or_default())
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(path: &Path, columns: &[Column]) -> Result<()> {
    std::fs::write(path, render_csv(columns)).map_err(Error::io(path))
}

/// Text rows under a header; cells must not contain commas.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(Error::io(path))
}

/// A named check and whether it held.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Everything needed to reproduce a run: the resolved config (defaults
/// marked), derived scales, solver settings actually used, the files
/// written, per-check verdicts and the wall time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunManifest {
    /// key, value, whether the default was used
    pub config: Vec<(String, String, bool)>,
    pub scales: Vec<(String, f64)>,
    pub solver: Vec<(String, String)>,
    pub results: Vec<(String, String)>,
    pub outputs: Vec<String>,
    pub checks: Vec<Check>,
    pub failure: Option<String>,
    pub wall_time: Duration,
}

impl RunManifest {
    pub fn solver(&mut self, key: impl Into<String>, value: impl ToString) {
        self.solver.push((key.into(), value.to_string()));
    }

    pub fn result(&mut self, key: impl Into<String>, value: impl ToString) {
        self.results.push((key.into(), value.to_string()));
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }

    pub fn all_passed(&self) -> bool {
        self.failure.is_none() && self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("# config (resolved; `# default` marks keys not given in the file)\n");
        for (k, v, default) in &self.config {
            let mark = if *default { "  # default" } else { "" };
            let _ = writeln!(out, "{k} = {v}{mark}");
        }
        out.push_str("\n# derived scales\n");
        for (k, v) in &self.scales {
            let _ = writeln!(out, "scales.{k} = {}", number(*v));
        }
        out.push_str("\n# solver settings\n");
        for (k, v) in &self.solver {
            let _ = writeln!(out, "solver.{k} = {v}");
        }
        if !self.results.is_empty() {
            out.push_str("\n# results\n");
            for (k, v) in &self.results {
                let _ = writeln!(out, "result.{k} = {v}");
            }
        }
        out.push_str("\n# outputs\n");
        for f in &self.outputs {
            let _ = writeln!(out, "file = {f}");
        }
        out.push_str("\n# verdicts\n");
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{status} {}: {}", c.name, c.detail);
        }
        if let Some(cause) = &self.failure {
            let _ = writeln!(out, "FAIL run: {cause}");
        }
        let _ = writeln!(out, "\nwall_time_s = {:.3}", self.wall_time.as_secs_f64());
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).map_err(Error::io(path))
    }
}
