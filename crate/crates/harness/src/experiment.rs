//! The full experiment: for each seed, build the antigen universe, evolve
//! antibodies, recombine one schedule per scenario, run the per-scenario
//! GA baseline, and measure makespans and robustness for both methods.

use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;

use aisched_core::ais::{build_antigen_universe, build_schedule, evolve_antibodies, evolve_schedule};
use aisched_core::ga::{CrossoverOp, GaConfig};
use aisched_core::instance::{generate_instance, parse_instance, Instance, Time};
use aisched_core::library::GeneLibrary;
use aisched_core::scenario::{apply_scenario, parse_scenarios, Scenario};
use aisched_core::schedule::Schedule;
use aisched_core::seeding::derive_seed;

use crate::robustness::{robustness, RobustnessReport};
use crate::scenario_gen::generate_scenarios;
use crate::HarnessError;

// Sub-seed streams, keeping the phases statistically independent.
const STREAM_UNIVERSE: u64 = 1;
const STREAM_LIBRARY: u64 = 2;
const STREAM_EVOLVE: u64 = 3;
const STREAM_BASELINE: u64 = 1000;

/// Gene-library dimensions used to express the antibody population.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LibraryShape {
    pub libraries: usize,
    pub components: usize,
    pub component_length: usize,
    pub wildcard_rate: f64,
}

impl LibraryShape {
    pub fn antibody_length(&self) -> usize {
        self.libraries * self.component_length
    }
}

/// Everything one AIS run needs besides the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct AisParams {
    pub ga: GaConfig,
    pub crossover: CrossoverOp,
    pub library: LibraryShape,
    /// Antigens drawn per generation; defaults to half the universe.
    pub sample_size: Option<usize>,
}

impl AisParams {
    pub fn resolve_sample(&self, universe_len: usize) -> usize {
        self.sample_size
            .unwrap_or(universe_len / 2)
            .clamp(1, universe_len)
    }
}

#[derive(Debug, Clone)]
pub enum InstanceSource {
    File(PathBuf),
    Generated {
        seed: u64,
        jobs: usize,
        machines: usize,
        duration: (Time, Time),
    },
}

impl InstanceSource {
    pub fn load(&self) -> Result<Instance, HarnessError> {
        match self {
            InstanceSource::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
                    path: path.clone(),
                    source,
                })?;
                Ok(parse_instance(&text)?)
            }
            InstanceSource::Generated {
                seed,
                jobs,
                machines,
                duration,
            } => Ok(generate_instance(*seed, *jobs, *machines, *duration)?),
        }
    }
}

#[derive(Debug, Clone)]
pub enum ScenarioSource {
    File(PathBuf),
    Generated { seed: u64, count: usize },
}

impl ScenarioSource {
    pub fn load(&self, instance: &Instance) -> Result<Vec<Scenario>, HarnessError> {
        let scenarios = match self {
            ScenarioSource::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
                    path: path.clone(),
                    source,
                })?;
                parse_scenarios(&text)?
            }
            ScenarioSource::Generated { seed, count } => {
                generate_scenarios(instance, *count, *seed)
            }
        };
        if scenarios.is_empty() {
            return Err(HarnessError::InvalidConfig(
                "scenario suite is empty".into(),
            ));
        }
        Ok(scenarios)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub instance: InstanceSource,
    pub scenarios: ScenarioSource,
    pub params: AisParams,
    pub seeds: Vec<u64>,
}

/// Scheduling method a report row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ais,
    Ga,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ais => "ais",
            Method::Ga => "ga",
        }
    }
}

/// One CSV row: a (seed, scenario, method) cell of the experiment grid.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub seed: u64,
    pub scenario_id: usize,
    pub method: Method,
    pub makespan: Time,
    pub system_fitness_final: Option<f64>,
    pub robustness_mean: f64,
    pub generations: usize,
    pub wall_time_ms: Option<u128>,
}

/// Everything recorded for one seed.
#[derive(Debug, Clone, Serialize)]
pub struct SeedRun {
    pub seed: u64,
    pub ais: RobustnessReport,
    pub ga: RobustnessReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub scenario_count: usize,
    pub rows: Vec<ReportRow>,
    pub runs: Vec<SeedRun>,
}

impl ExperimentReport {
    pub fn mean_makespan(&self, method: Method) -> f64 {
        let values: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.method == method)
            .map(|r| r.makespan as f64)
            .collect();
        values.iter().sum::<f64>() / values.len() as f64
    }

    /// Seeds on which the AIS run was at least as robust as the baseline.
    pub fn robustness_wins(&self) -> usize {
        self.runs
            .iter()
            .filter(|run| run.ais.mean_similarity >= run.ga.mean_similarity)
            .count()
    }
}

/// AIS half of one seed: universe, evolution, one schedule per scenario.
pub fn run_ais_once(
    instance: &Instance,
    scenarios: &[Scenario],
    scenario_instances: &[Instance],
    params: &AisParams,
    seed: u64,
) -> Result<(Vec<Schedule>, Vec<f64>), HarnessError> {
    let universe = build_antigen_universe(
        instance,
        scenarios,
        &params.ga.with_seed(derive_seed(seed, STREAM_UNIVERSE)),
        params.crossover,
    )?;
    let libraries = GeneLibrary::init(
        derive_seed(seed, STREAM_LIBRARY),
        params.library.libraries,
        params.library.components,
        params.library.component_length,
        &instance.job_ids(),
        params.library.wildcard_rate,
    )?;
    let sample = params.resolve_sample(universe.len());
    let (population, trace) = evolve_antibodies(
        &libraries,
        &universe,
        &params.ga.with_seed(derive_seed(seed, STREAM_EVOLVE)),
        params.crossover,
        sample,
    )?;
    let mut schedules = Vec::with_capacity(scenario_instances.len());
    for perturbed in scenario_instances {
        let schedule = build_schedule(&population, perturbed)?;
        schedule.validate(perturbed)?;
        schedules.push(schedule);
    }
    Ok((schedules, trace))
}

/// GA baseline: an independent sequence-space GA per scenario.
pub fn run_baseline_once(
    scenario_instances: &[Instance],
    params: &AisParams,
    seed: u64,
) -> Result<Vec<Schedule>, HarnessError> {
    let mut schedules = Vec::with_capacity(scenario_instances.len());
    for (i, perturbed) in scenario_instances.iter().enumerate() {
        let config = params
            .ga
            .with_seed(derive_seed(seed, STREAM_BASELINE + i as u64));
        let (schedule, _) = evolve_schedule(perturbed, &config, params.crossover)?;
        schedule.validate(perturbed)?;
        schedules.push(schedule);
    }
    Ok(schedules)
}

/// Runs the whole grid. Pure computation: nothing is written to disk, so
/// a failing configuration leaves no partial outputs behind.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    if config.seeds.is_empty() {
        return Err(HarnessError::InvalidConfig("need at least one seed".into()));
    }
    config.params.ga.validate()?;
    let instance = config.instance.load()?;
    let scenarios = config.scenarios.load(&instance)?;
    let scenario_instances: Result<Vec<Instance>, _> = scenarios
        .iter()
        .map(|s| apply_scenario(&instance, s))
        .collect();
    let scenario_instances = scenario_instances?;

    // The antibody length bound must hold against the shortest machine
    // sequence any scenario can produce.
    let shortest = scenario_instances
        .iter()
        .flat_map(|inst| (0..inst.machine_count).map(|m| inst.jobs_on_machine(m).len()))
        .min()
        .unwrap_or(0);
    if config.params.library.antibody_length() >= shortest {
        return Err(HarnessError::InvalidConfig(format!(
            "antibody length {} must be below the shortest machine sequence {}",
            config.params.library.antibody_length(),
            shortest
        )));
    }

    let mut rows = Vec::new();
    let mut runs = Vec::new();
    for &seed in &config.seeds {
        let ais_started = Instant::now();
        let (ais_schedules, trace) = run_ais_once(
            &instance,
            &scenarios,
            &scenario_instances,
            &config.params,
            seed,
        )?;
        let ais_ms = ais_started.elapsed().as_millis();
        let mut ais_report = robustness(&ais_schedules)?;
        ais_report.system_fitness_trace = trace;

        let ga_started = Instant::now();
        let ga_schedules = run_baseline_once(&scenario_instances, &config.params, seed)?;
        let ga_ms = ga_started.elapsed().as_millis();
        let ga_report = robustness(&ga_schedules)?;

        let final_fitness = ais_report.system_fitness_trace.last().copied();
        for (scenario_id, schedule) in ais_schedules.iter().enumerate() {
            rows.push(ReportRow {
                seed,
                scenario_id,
                method: Method::Ais,
                makespan: schedule.makespan(),
                system_fitness_final: final_fitness,
                robustness_mean: ais_report.mean_similarity,
                generations: config.params.ga.generations,
                wall_time_ms: Some(ais_ms),
            });
        }
        for (scenario_id, schedule) in ga_schedules.iter().enumerate() {
            rows.push(ReportRow {
                seed,
                scenario_id,
                method: Method::Ga,
                makespan: schedule.makespan(),
                system_fitness_final: None,
                robustness_mean: ga_report.mean_similarity,
                generations: config.params.ga.generations,
                wall_time_ms: Some(ga_ms),
            });
        }
        runs.push(SeedRun {
            seed,
            ais: ais_report,
            ga: ga_report,
        });
    }

    Ok(ExperimentReport {
        scenario_count: scenarios.len(),
        rows,
        runs,
    })
}
