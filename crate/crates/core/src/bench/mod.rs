//! Experiment harness: parameter sweeps, per-trial IO rows, CSV and SVG output.

mod chart;
mod config;
mod run;

pub use chart::{chart_axis, emit_chart, render_chart};
pub use config::{Algorithm, DataSource, ExperimentConfig, SweepPoint, SweepVar};
pub use run::{emit_csv, load_dataset, run_experiment, run_point, summarize, ResultRow, Summary, CSV_HEADER};
