//! Experiment orchestration: configuration, stability runs with decay fits,
//! inequality suites and report emission.

mod config;
mod fit;
mod report;
mod stability;
mod suites;

pub use config::{ExperimentConfig, FieldRecipe, GridConfig, OutputConfig, SolverMethod, WindowConfig};
pub use fit::{fit_decay, DecayFit, SLOPE_TOL};
pub use report::{emit_report, fmt_f64, write_csv, ReportFormat, Reportable};
pub use stability::{
    run_stability_experiment, synthesize, window_times, StabilityReport, StabilityRow, StabilitySummary,
    STABILITY_COLUMNS,
};
pub use suites::{
    parse_selection, run_verification_suites, DetailRow, SuiteConfig, SuiteReport, SuiteResult, SuiteVerdict,
    DRIFT_TOL, SUITE_NAMES,
};
