//! Experiment harness for immune-inspired job-shop scheduling: scenario
//! suites, AIS-versus-GA comparison runs, rescheduling with population
//! reuse, robustness measurement, and report emission.

use std::path::PathBuf;

use thiserror::Error;

pub mod experiment;
pub mod report;
pub mod reschedule;
pub mod robustness;
pub mod scenario_gen;

pub use experiment::{
    run_ais_once, run_baseline_once, run_experiment, AisParams, ExperimentConfig,
    ExperimentReport, InstanceSource, LibraryShape, Method, ReportRow, ScenarioSource, SeedRun,
};
pub use report::{report_csv, report_json, write_reports};
pub use reschedule::{reschedule, RescheduleOutcome};
pub use robustness::{robustness, RobustnessReport};
pub use scenario_gen::generate_scenarios;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("need at least two schedules to measure robustness")]
    NeedAtLeastTwo,
    #[error("schedules span different machine counts")]
    MachineCountMismatch,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] aisched_core::instance::ParseError),
    #[error(transparent)]
    Generate(#[from] aisched_core::instance::GenerateError),
    #[error(transparent)]
    Scenario(#[from] aisched_core::scenario::ScenarioError),
    #[error(transparent)]
    Schedule(#[from] aisched_core::schedule::ScheduleError),
    #[error(transparent)]
    Match(#[from] aisched_core::matching::MatchError),
    #[error(transparent)]
    Library(#[from] aisched_core::library::LibraryError),
    #[error(transparent)]
    Ga(#[from] aisched_core::ga::GaError),
    #[error(transparent)]
    Ais(#[from] aisched_core::ais::AisError),
}
