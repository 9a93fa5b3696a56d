//! Immune-inspired job-shop scheduling and rescheduling.
//!
//! The model: an *antigen* is the job sequence of one machine in a good
//! schedule for one environment scenario; an *antibody* is a shorter job
//! sequence (with optional wildcards) that acts as a reusable scheduling
//! building block. Antibodies are expressed from gene libraries, scored
//! against antigens by sliding alignment, evolved with a genetic
//! algorithm, and finally recombined into complete schedules.
//!
//! Modules, bottom up:
//!
//! - [`instance`]: problem instances, the text loader, and a generator
//! - [`scenario`]: arrival shifts, new jobs, breakdowns
//! - [`schedule`]: semi-active decoding, makespan, validation
//! - [`matching`]: antibody/antigen alignment and scoring
//! - [`library`]: gene libraries expressing antibodies
//! - [`ga`]: the seeded genetic algorithm and crossover operators
//! - [`ais`]: the immune loop and schedule recombination

pub mod ais;
pub mod ga;
pub mod instance;
pub mod library;
pub mod matching;
pub mod scenario;
pub mod schedule;
pub mod seeding;

pub use ais::{
    assign_antibody_fitness, build_antigen_universe, build_schedule, evolve_antibodies,
    evolve_antibodies_from, evolve_schedule, simple_recombination, single_job_addition,
    somatic_recombination, system_fitness, AisError, AntibodyPopulation, AntigenUniverse,
    SequenceSet,
};
pub use ga::{CrossoverOp, GaConfig, GaError, GaOutcome, GenerationStats};
pub use instance::{
    generate_instance, parse_instance, Breakdown, GenerateError, Instance, InstanceError, Job,
    JobId, Operation, ParseError, Time,
};
pub use library::{expressible_count, Component, GeneLibrary, LibraryError};
pub use matching::{
    alignment_score, antigen_deficit, match_score, perfect_score, Antibody, Antigen, MatchError,
    Symbol,
};
pub use scenario::{apply_scenario, parse_scenarios, scenarios_to_json, NewJob, Scenario,
    ScenarioError};
pub use schedule::{decode, Schedule, ScheduleError, ScheduledOp};
pub use seeding::derive_seed;
