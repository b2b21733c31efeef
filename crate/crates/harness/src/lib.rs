//! Configuration-driven convergence experiments: scalar kernels, boundary
//! integral operators and the stability reports of the Gauss methods.

pub mod config;
pub mod presets;
pub mod report;
pub mod run;

pub use config::{
    parse_configs, BemConvergence, ExperimentConfig, Overrides, ScalarConvergence, StageRange,
};
pub use presets::preset;
pub use report::{convergence_rows, eoc, ConvergenceReport, ConvergenceRow, Index, IndexEntry};
pub use run::{
    run_batch, run_bem_convergence, run_cancellation_table, run_experiment, run_scalar_convergence,
    run_stability_report, write_outcomes, Outcome, RunContext, StabilityReport,
};
