//! Experiment registry, runs and sweeps, metrics, and comparison reports.

mod metrics;
mod registry;
mod report;
mod runner;

pub use metrics::{accuracy, confusion_matrix, ConfusionMatrix, ConfusionPercent};
pub use registry::{
    builtin_registry, find_builtin, first_model_specs, second_model_specs, spec_set, variant_specs,
    ExperimentSpec, DTI_EPOCHS, FIRST_MODEL_EPOCHS, FIRST_MODEL_TRAIN_FRACTION, SECOND_MODEL_EPOCHS,
    SECOND_MODEL_TRAIN_FRACTION, TABLE2_WIDTHS,
};
pub use report::{
    comparison_report, ours_by_battery, ours_only, BaselineEntry, BaselineTable, ComparisonReport,
    ComparisonRow, Provenance, FIRST_MODEL_REFERENCE_PCT,
};
pub use runner::{
    median, run_experiment, run_experiment_with_model, run_sweep, FailedRun, RunRecord, RunResult, SpecSummary, Sweep,
    SweepSummary, BALANCE_STREAM, INIT_STREAM, SPLIT_STREAM,
};
