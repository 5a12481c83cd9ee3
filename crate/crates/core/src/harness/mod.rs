//! Experiment orchestration: TOML configs, parallel trials, JSON-lines and
//! CSV results, and summaries with Wilson intervals.

mod config;
mod metrics;
mod run;
mod stats;

pub use config::{ExperimentConfig, GraphSpec, Scenario, SearchSpec, TFormula, TSpec};
pub use metrics::{evaluate_estimate, EstimateMetrics};
pub use run::{parse_rows, read_rows, run_experiment, write_csv, write_jsonl, write_results, ResultRow};
pub use stats::{plot_csv, plot_points, summarize, wilson, GroupSummary, Interval, PlotPoint, SummaryStats, Z95, Z99};
