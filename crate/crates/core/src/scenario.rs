//! Environment changes applied to an instance: shifted arrival dates,
//! newly introduced jobs, and machine breakdown windows.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{Breakdown, Instance, InstanceError, Job, JobId, Operation, Time};

/// A job introduced by a scenario. Ids are assigned when the scenario is
/// applied, continuing after the highest existing id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewJob {
    pub routing: Vec<Operation>,
    #[serde(default)]
    pub release: Time,
}

/// One perturbation of the base instance. An all-empty scenario is the
/// identity: applying it reproduces the instance unchanged.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default)]
    pub arrival_shifts: BTreeMap<JobId, i64>,
    #[serde(default)]
    pub new_jobs: Vec<NewJob>,
    #[serde(default)]
    pub breakdowns: Vec<Breakdown>,
}

impl Scenario {
    pub fn is_identity(&self) -> bool {
        self.arrival_shifts.is_empty() && self.new_jobs.is_empty() && self.breakdowns.is_empty()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("arrival shift references unknown job {0}")]
    UnknownJob(JobId),
    #[error("scenario references machine {machine}, but only {count} machines exist")]
    UnknownMachine { machine: usize, count: usize },
    #[error("scenario is not valid JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Invalid(#[from] InstanceError),
}

/// Applies a scenario, returning the perturbed instance. Releases are
/// shifted with clamping at zero, new jobs get fresh ids, and breakdown
/// windows are attached for decoding.
pub fn apply_scenario(instance: &Instance, scenario: &Scenario) -> Result<Instance, ScenarioError> {
    for &job in scenario.arrival_shifts.keys() {
        if instance.job(job).is_none() {
            return Err(ScenarioError::UnknownJob(job));
        }
    }
    for nj in &scenario.new_jobs {
        for op in &nj.routing {
            if op.machine >= instance.machine_count {
                return Err(ScenarioError::UnknownMachine {
                    machine: op.machine,
                    count: instance.machine_count,
                });
            }
        }
    }
    for b in &scenario.breakdowns {
        if b.machine >= instance.machine_count {
            return Err(ScenarioError::UnknownMachine {
                machine: b.machine,
                count: instance.machine_count,
            });
        }
    }

    let mut jobs = instance.jobs.clone();
    for job in &mut jobs {
        if let Some(&delta) = scenario.arrival_shifts.get(&job.id) {
            let shifted = (job.release as i128 + delta as i128).max(0);
            job.release = shifted as Time;
        }
    }
    let next_id = jobs.iter().map(|j| j.id).max().unwrap_or(0) + 1;
    for (id, nj) in (next_id..).zip(&scenario.new_jobs) {
        jobs.push(Job {
            id,
            routing: nj.routing.clone(),
            release: nj.release,
        });
    }
    let mut breakdowns = instance.breakdowns.clone();
    breakdowns.extend(scenario.breakdowns.iter().copied());

    Ok(Instance::new(jobs, instance.machine_count, breakdowns)?)
}

/// Loads either a single scenario object or an array of them from JSON.
pub fn parse_scenarios(text: &str) -> Result<Vec<Scenario>, ScenarioError> {
    if let Ok(list) = serde_json::from_str::<Vec<Scenario>>(text) {
        return Ok(list);
    }
    serde_json::from_str::<Scenario>(text)
        .map(|s| vec![s])
        .map_err(|e| ScenarioError::Json(e.to_string()))
}

/// Renders a scenario list as JSON.
pub fn scenarios_to_json(scenarios: &[Scenario]) -> String {
    serde_json::to_string_pretty(scenarios).expect("scenario serialization cannot fail")
}
