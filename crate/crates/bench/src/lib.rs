//! Dataset loading, the four-way benchmark runner and report writing behind
//! the `qboost` command.

pub mod data;
pub mod experiment;
pub mod report;

pub use data::{load_csv_dataset, load_idx_subset, CsvOptions, DataError};
pub use experiment::{run_experiment, run_on_split, select_subset, split, DataFormat, ExperimentConfig, RunOutcome};
pub use report::{accuracy_curve, curve_csv, emit_report, mean_std, CurveRow};
