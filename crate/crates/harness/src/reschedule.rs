//! Rescheduling with reuse: when the environment changes, the antibody
//! population from the previous run warm-starts the new evolution instead
//! of expressing a fresh one, and the same evolution is run cold for
//! comparison. New jobs never appear inside antibodies; they enter the
//! schedule through single-job addition during recombination.

use aisched_core::ais::{build_schedule, evolve_antibodies, evolve_antibodies_from, AntibodyPopulation, build_antigen_universe};
use aisched_core::instance::Instance;
use aisched_core::library::GeneLibrary;
use aisched_core::scenario::{apply_scenario, Scenario};
use aisched_core::schedule::Schedule;
use aisched_core::seeding::derive_seed;

use crate::experiment::AisParams;
use crate::HarnessError;

const STREAM_UNIVERSE: u64 = 21;
const STREAM_LIBRARY: u64 = 22;
const STREAM_EVOLVE: u64 = 23;

#[derive(Debug, Clone)]
pub struct RescheduleOutcome {
    pub schedule: Schedule,
    pub population: AntibodyPopulation,
    /// System-fitness trace of the warm-started evolution.
    pub warm_trace: Vec<f64>,
    /// Trace of the cold run on the same universe and evolution seed.
    pub cold_trace: Vec<f64>,
    /// First warm generation at or below the cold run's final fitness.
    pub warm_generations_to_cold_final: Option<usize>,
}

/// Reschedules after `scenario` hits the shop. An identity scenario
/// changes nothing, so the previous schedule is returned as is.
pub fn reschedule(
    previous_population: &AntibodyPopulation,
    previous_schedule: &Schedule,
    base_instance: &Instance,
    scenario: &Scenario,
    params: &AisParams,
    seed: u64,
) -> Result<RescheduleOutcome, HarnessError> {
    if previous_population.is_empty() {
        return Err(HarnessError::InvalidConfig(
            "previous antibody population is empty".into(),
        ));
    }
    if scenario.is_identity() {
        previous_schedule.validate(base_instance)?;
        return Ok(RescheduleOutcome {
            schedule: previous_schedule.clone(),
            population: previous_population.clone(),
            warm_trace: Vec::new(),
            cold_trace: Vec::new(),
            warm_generations_to_cold_final: None,
        });
    }

    let perturbed = apply_scenario(base_instance, scenario)?;
    let universe = build_antigen_universe(
        base_instance,
        std::slice::from_ref(scenario),
        &params.ga.with_seed(derive_seed(seed, STREAM_UNIVERSE)),
        params.crossover,
    )?;
    let sample = params.resolve_sample(universe.len());
    let evolve_config = params.ga.with_seed(derive_seed(seed, STREAM_EVOLVE));

    let (population, warm_trace) = evolve_antibodies_from(
        previous_population.antibodies.clone(),
        &universe,
        &evolve_config,
        params.crossover,
        sample,
    )?;

    let libraries = GeneLibrary::init(
        derive_seed(seed, STREAM_LIBRARY),
        params.library.libraries,
        params.library.components,
        params.library.component_length,
        &base_instance.job_ids(),
        params.library.wildcard_rate,
    )?;
    let (_, cold_trace) = evolve_antibodies(
        &libraries,
        &universe,
        &evolve_config,
        params.crossover,
        sample,
    )?;

    let cold_final = *cold_trace.last().expect("trace has the initial entry");
    let warm_generations_to_cold_final = warm_trace.iter().position(|&f| f <= cold_final);

    let schedule = build_schedule(&population, &perturbed)?;
    schedule.validate(&perturbed)?;

    Ok(RescheduleOutcome {
        schedule,
        population,
        warm_trace,
        cold_trace,
        warm_generations_to_cold_final,
    })
}
