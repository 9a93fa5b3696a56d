//! Cross-schedule robustness: how much of the sequencing structure
//! survives from one scenario's schedule to another's.
//!
//! For every unordered schedule pair and every machine, the similarity is
//! the share of ordered adjacent job pairs the two sequences have in
//! common, restricted to the jobs present in both (job sets differ when
//! scenarios introduce new jobs). Machine similarities average into a
//! pair similarity; pair similarities average into the mean.

use serde::{Deserialize, Serialize};

use aisched_core::instance::{JobId, Time};
use aisched_core::schedule::Schedule;

use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    /// One similarity per unordered schedule pair, in `[0, 1]`,
    /// in (i, j) lexicographic order.
    pub pair_similarities: Vec<f64>,
    pub mean_similarity: f64,
    /// Makespan of each input schedule, in input order.
    pub makespans: Vec<Time>,
    /// System-fitness trace of the evolution that produced the schedules;
    /// empty when the method has none (the GA baseline).
    #[serde(default)]
    pub system_fitness_trace: Vec<f64>,
}

fn ordered_adjacencies(seq: &[JobId]) -> Vec<(JobId, JobId)> {
    seq.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Similarity of two machine sequences over their common jobs.
fn sequence_similarity(a: &[JobId], b: &[JobId]) -> f64 {
    let common: Vec<JobId> = a.iter().copied().filter(|j| b.contains(j)).collect();
    let ra: Vec<JobId> = a.iter().copied().filter(|j| common.contains(j)).collect();
    let rb: Vec<JobId> = b.iter().copied().filter(|j| common.contains(j)).collect();
    let adj_a = ordered_adjacencies(&ra);
    let adj_b = ordered_adjacencies(&rb);
    let shared = adj_a.iter().filter(|p| adj_b.contains(p)).count();
    let denom = common.len().saturating_sub(1).max(1);
    shared as f64 / denom as f64
}

fn pair_similarity(a: &Schedule, b: &Schedule) -> f64 {
    let machines = a.machine_sequences.len();
    let total: f64 = (0..machines)
        .map(|m| sequence_similarity(&a.machine_sequences[m], &b.machine_sequences[m]))
        .sum();
    total / machines as f64
}

/// Measures pairwise similarity across schedules of the same shop.
pub fn robustness(schedules: &[Schedule]) -> Result<RobustnessReport, HarnessError> {
    if schedules.len() < 2 {
        return Err(HarnessError::NeedAtLeastTwo);
    }
    let machines = schedules[0].machine_sequences.len();
    if schedules
        .iter()
        .any(|s| s.machine_sequences.len() != machines)
    {
        return Err(HarnessError::MachineCountMismatch);
    }
    let mut pair_similarities = Vec::new();
    for i in 0..schedules.len() {
        for j in (i + 1)..schedules.len() {
            pair_similarities.push(pair_similarity(&schedules[i], &schedules[j]));
        }
    }
    let mean_similarity =
        pair_similarities.iter().sum::<f64>() / pair_similarities.len() as f64;
    Ok(RobustnessReport {
        pair_similarities,
        mean_similarity,
        makespans: schedules.iter().map(|s| s.makespan()).collect(),
        system_fitness_trace: Vec::new(),
    })
}
