//! Dimension sweeps over the metrics, aggregated into CSV rows.
//!
//! Every sweep is a pure function of its [`ExperimentConfig`]: seeds for a
//! repetition are derived from `(seed, dimension, repetition)`, so identical
//! configurations give byte-identical CSV regardless of thread count.

#[cfg(feature = "cli")]
mod cli;
mod config;
mod plot;
mod rows;
mod runners;

#[cfg(feature = "cli")]
pub use cli::{cli_main, EXIT_ALL_FAILED, EXIT_CONFIG, EXIT_OK};
pub use config::{DimRange, ExperimentConfig, ExperimentKind};
pub use plot::{render_svg, write_svg};
pub use rows::{write_rows, ExperimentRow, RowStatus, CSV_HEADER};
pub use runners::{
    metric_names, run_experiment, run_gaussian_metrics, run_ipm_separation, run_report, run_sd_separation, RunReport,
};
