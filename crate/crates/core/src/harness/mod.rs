//! Configuration, pipeline orchestration and report output for the
//! command-line driver.

mod config;
mod emit;
mod pipeline;
mod report;

pub use config::{
    load_config, parse_config, ChainConfig, CompareConfig, Format, GeometryConfig, InitialGuess, OutputConfig, RunConfig,
};
pub use emit::emit_report;
pub use pipeline::{ratio_limit, run_pipeline};
pub use report::{Criterion, PlotSeries, Provenance, RunReport, Stage, StageReport, StageStatus, Table, TableRow, SCHEMA};
