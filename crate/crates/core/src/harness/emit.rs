use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::config::Format;
use super::report::{RunReport, Table};
use crate::error::{Error, Result};

/// Write the report under `dir`:
///
/// - `report.json`, the full report;
/// - `tables/<name>.csv`, one per table, with header
///   `mode_index,value,reference,abs_err,rel_err`;
/// - `plotdata/<name>.dat`, two whitespace-separated columns per series,
///   preceded by `#` comment lines naming the panel and axes.
///
/// Returns the written paths in order.
pub fn emit_report(report: &RunReport, dir: &Path, formats: &[Format]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    create_dir(dir)?;
    if formats.contains(&Format::Json) {
        let path = dir.join("report.json");
        let mut text = serde_json::to_string_pretty(report).map_err(|e| Error::Config(format!("report serialisation: {e}")))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    if formats.contains(&Format::Csv) {
        let sub = dir.join("tables");
        create_dir(&sub)?;
        for table in &report.tables {
            let path = sub.join(format!("{}.csv", table.name));
            write_csv(table, &path)?;
            written.push(path);
        }
    }
    if formats.contains(&Format::Plotdata) {
        let sub = dir.join("plotdata");
        create_dir(&sub)?;
        for series in &report.plots {
            let path = sub.join(format!("{}.dat", series.name));
            let mut buf = format!("# {}\n# panel: {}\n# {} {}\n", series.name, series.panel, series.x_label, series.y_label);
            for (x, y) in &series.points {
                buf.push_str(&format!("{x} {y}\n"));
            }
            fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
    }
    Ok(written)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_csv(table: &Table, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(path, e),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    };
    // an empty table still gets its header
    w.write_record(["mode_index", "value", "reference", "abs_err", "rel_err"]).map_err(io)?;
    for row in &table.rows {
        w.serialize((row.mode_index, row.value, row.reference, row.abs_err, row.rel_err)).map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    let mut file = w.into_inner().map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    file.flush().map_err(|e| Error::io(path, e))
}
