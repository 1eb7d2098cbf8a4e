//! Data ingestion, synthetic instances and experiment orchestration.

mod experiment;
mod libsvm;
mod synthetic;

pub use experiment::{
    benchmark_algorithms, build_instances, default_grid, run_config, run_experiment, run_instance, AlgorithmSpec, Cell, ExperimentConfig,
    ExperimentResult, GridEntry, Instance, Model, ProblemSpec, RunOutcome, StatsTable, RUNS_CSV_HEADER, SOLVED_CSV_HEADER, STATS_CSV_HEADER,
};
pub use libsvm::{binarize_labels, parse_libsvm, serialize_libsvm, SparseDataset};
pub use synthetic::{generate, random_dataset, synthetic_suite, Problem, SyntheticInstance, SyntheticKind, SyntheticSpec};
