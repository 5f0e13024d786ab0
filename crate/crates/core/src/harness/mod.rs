//! Experiment orchestration: config files, the stage loop, hindsight regret,
//! paired comparisons, and timing.

mod bench;
mod config;
mod rng;
mod run;

pub use bench::{bench_csv, benchmark_runtime, correlation, fit_power_law, BenchOptions, BenchRow, PowerFit};
pub use config::{
    AdversaryChoice, BattlefieldChoice, ExperimentConfig, ExplorationChoice, LearnerKind,
    CONFIG_VERSION,
};
pub use rng::{stream, Stream};
pub use run::{
    checkpoint_stages, compare_regret, resolve_setup, run_experiment, run_with_setup, simulate,
    Comparison, ExperimentOutcome, RegretTrace, ResolvedSetup, RunSummary, TracePoint,
};
