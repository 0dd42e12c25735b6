//! Experiment orchestration: configuration, scoring, the multi-seed
//! (model, target) grid and report files.

mod config;
mod metrics;
mod report;
mod runner;

pub use config::{Method, RunConfig, DEFAULT_SEEDS, OUTPUT_DIR_ENV};
pub use metrics::{median, mse};
pub use report::{
    emit_all, emit_report, Cell, CellTiming, EvalReport, ReportFormat, ReportMeta, SeedResult,
    CSV_HEADER, REPORT_DIGITS,
};
pub use runner::{esn_seed, fit_and_score, run_experiment, run_on_table, train_single, Scored};
