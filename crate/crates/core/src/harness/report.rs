use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Identifier written into every report.
pub const SCHEMA: &str = "finite-proxy.report/1";

/// Pipeline stages, in the order they run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    ReduceStatic,
    ReduceWave,
    ReconstructChain,
    SimulateChain,
    CompareSpectra,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::ReduceStatic,
        Stage::ReduceWave,
        Stage::ReconstructChain,
        Stage::SimulateChain,
        Stage::CompareSpectra,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::ReduceStatic => "reduce-static",
            Stage::ReduceWave => "reduce-wave",
            Stage::ReconstructChain => "reconstruct-chain",
            Stage::SimulateChain => "simulate-chain",
            Stage::CompareSpectra => "compare-spectra",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How a table row is judged against its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// `abs_err <= tolerance`.
    Absolute,
    /// `rel_err <= tolerance`.
    Relative,
    /// `value <= reference + tolerance`.
    UpperBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub mode_index: usize,
    pub value: f64,
    pub reference: f64,
    pub abs_err: f64,
    /// `abs_err / |reference|`, or `abs_err` when the reference is zero.
    pub rel_err: f64,
}

impl TableRow {
    pub fn new(mode_index: usize, value: f64, reference: f64) -> Self {
        let abs_err = (value - reference).abs();
        let rel_err = if reference == 0.0 { abs_err } else { abs_err / reference.abs() };
        Self { mode_index, value, reference, abs_err, rel_err }
    }

    fn passes(&self, criterion: Criterion, tolerance: f64) -> bool {
        match criterion {
            Criterion::Absolute => self.abs_err <= tolerance,
            Criterion::Relative => self.rel_err <= tolerance,
            Criterion::UpperBound => self.value <= self.reference + tolerance,
        }
    }
}

/// A numeric table with its own tolerance and verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub stage: Stage,
    pub description: String,
    pub criterion: Criterion,
    pub tolerance: f64,
    pub passed: bool,
    pub rows: Vec<TableRow>,
}

impl Table {
    pub fn new(
        name: impl Into<String>,
        stage: Stage,
        description: impl Into<String>,
        criterion: Criterion,
        tolerance: f64,
        rows: Vec<TableRow>,
    ) -> Self {
        let passed = rows.iter().all(|r| r.passes(criterion, tolerance));
        Self {
            name: name.into(),
            stage,
            description: description.into(),
            criterion,
            tolerance,
            passed,
            rows,
        }
    }

    /// Largest error in the table's own criterion (`value - reference` for
    /// bounds); `None` for an empty table.
    pub fn worst(&self) -> Option<f64> {
        self.rows
            .iter()
            .map(|r| match self.criterion {
                Criterion::Absolute => r.abs_err,
                Criterion::Relative => r.rel_err,
                Criterion::UpperBound => r.value - r.reference,
            })
            .reduce(f64::max)
    }
}

/// One `(x, y)` series of a figure panel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotSeries {
    pub name: String,
    pub panel: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

impl PlotSeries {
    pub fn new(name: impl Into<String>, panel: impl Into<String>, labels: (&str, &str), points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            panel: panel.into(),
            x_label: labels.0.into(),
            y_label: labels.1.into(),
            points,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageStatus {
    Ok,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: Stage,
    pub status: StageStatus,
    /// Scalar results and small arrays, keyed by name.
    pub summary: BTreeMap<String, serde_json::Value>,
}

/// Provenance of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub schema: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    /// RFC 3339 wall-clock time; the only field that differs between runs.
    pub generated_at: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub provenance: Provenance,
    pub stages: Vec<StageReport>,
    pub tables: Vec<Table>,
    pub plots: Vec<PlotSeries>,
    /// Every table passed.
    pub passed: bool,
}

impl RunReport {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn stage(&self, stage: Stage) -> Option<&StageReport> {
        self.stages.iter().find(|s| s.stage == stage)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        let rows = vec![TableRow::new(1, 1.0, 1.0 + 1e-12), TableRow::new(2, 0.0, 0.0)];
        assert!(Table::new("t", Stage::ReduceStatic, "", Criterion::Relative, 1e-10, rows.clone()).passed);
        let loose = vec![TableRow::new(1, 1.1, 1.0)];
        assert!(!Table::new("t", Stage::ReduceStatic, "", Criterion::Absolute, 0.05, loose.clone()).passed);
        assert!(Table::new("t", Stage::ReduceStatic, "", Criterion::UpperBound, 0.1, loose).passed);
        assert!(Table::new("t", Stage::ReduceStatic, "", Criterion::Absolute, 0.0, vec![]).passed);
    }

    #[test]
    fn rel_err_of_zero_reference() {
        let r = TableRow::new(3, -2e-9, 0.0);
        assert_eq!(r.abs_err, 2e-9);
        assert_eq!(r.rel_err, 2e-9);
    }
}
