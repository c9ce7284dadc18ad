//! Run reports and their JSON, CSV and plot-data renderings.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::checks::{CheckReport, CheckRun, PlotSeries};
use crate::config::ExperimentConfig;
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    /// The configuration as run, including the effective seed.
    pub config: ExperimentConfig,
    pub construction: String,
    pub checks: Vec<CheckReport>,
    pub passed: bool,
}

impl RunReport {
    pub fn new(config: ExperimentConfig, checks: Vec<CheckReport>) -> Self {
        let construction = checks
            .first()
            .map(|c| c.construction.clone())
            .unwrap_or_else(|| config.construction.tag().to_string());
        let passed = checks.iter().all(|c| c.passed);
        RunReport {
            tool: "shiftlab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            construction,
            checks,
            passed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(["check_id", "construction", "verdict", "metric", "tolerance", "elapsed_ms"]).map_err(io)?;
        for c in &self.checks {
            w.write_record([
                c.check_id.clone(),
                c.construction.clone(),
                c.verdict.clone(),
                format!("{:e}", c.metric),
                format!("{:e}", c.tolerance),
                format!("{:.3}", c.elapsed_ms),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

/// Two whitespace-separated columns with a `#` header line.
pub fn render_dat(series: &PlotSeries) -> String {
    let mut out = format!("# {} {}\n", series.columns[0], series.columns[1]);
    for (x, y) in &series.rows {
        let _ = writeln!(out, "{x} {y:e}");
    }
    out
}

/// Writes one `.dat` file per series and returns the paths.
pub fn write_plots(run: &CheckRun, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (check, series) in &run.plots {
        let path = dir.join(format!("{check}_{}.dat", series.name));
        std::fs::write(&path, render_dat(series))?;
        paths.push(path);
    }
    Ok(paths)
}
