//! Semi-active schedule decoding from per-machine job orders, plus
//! makespan and invariant validation.
//!
//! Decoding repeatedly starts the earliest-startable operation consistent
//! with the given machine orders, routing precedence, release dates and
//! breakdown windows. When the given orders deadlock, the decoder repairs
//! them: among the job-ready operations it schedules the one whose job
//! sits earliest in its machine's remaining sequence (ties to the lower
//! machine index) and records the sequences it actually used.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{Breakdown, Instance, JobId, Time};

/// One scheduled operation with everything needed to audit it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduledOp {
    pub job: JobId,
    /// Position in the job's routing.
    pub pos: usize,
    pub machine: usize,
    pub start: Time,
    pub duration: Time,
}

impl ScheduledOp {
    pub fn end(&self) -> Time {
        self.start + self.duration
    }
}

/// A decoded schedule. `machine_sequences` are the orders actually used,
/// which differ from the requested ones only when deadlock repair ran.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub machine_sequences: Vec<Vec<JobId>>,
    pub ops: Vec<ScheduledOp>,
}

impl Schedule {
    /// Completion time of the whole schedule: max over operations of
    /// start + duration.
    pub fn makespan(&self) -> Time {
        self.ops.iter().map(|op| op.end()).max().unwrap_or(0)
    }

    pub fn start_of(&self, job: JobId, pos: usize) -> Option<Time> {
        self.ops
            .iter()
            .find(|op| op.job == job && op.pos == pos)
            .map(|op| op.start)
    }

    /// Checks every schedule invariant against `instance`: complete
    /// permutation sequences, no machine overlap, routing order, release
    /// dates, and breakdown avoidance.
    pub fn validate(&self, instance: &Instance) -> Result<(), ScheduleError> {
        if self.machine_sequences.len() != instance.machine_count {
            return Err(ScheduleError::WrongMachineCount {
                expected: instance.machine_count,
                found: self.machine_sequences.len(),
            });
        }
        for (m, seq) in self.machine_sequences.iter().enumerate() {
            check_permutation(instance, m, seq)?;
        }
        // Every routed operation appears exactly once with matching data.
        let mut expected = 0usize;
        for job in &instance.jobs {
            expected += job.routing.len();
            for (pos, step) in job.routing.iter().enumerate() {
                let op = self
                    .ops
                    .iter()
                    .find(|op| op.job == job.id && op.pos == pos)
                    .ok_or(ScheduleError::MissingOperation { job: job.id, pos })?;
                if op.machine != step.machine || op.duration != step.duration {
                    return Err(ScheduleError::RoutingMismatch { job: job.id, pos });
                }
                if op.start < job.release {
                    return Err(ScheduleError::ReleaseViolated { job: job.id, pos });
                }
                if pos > 0 {
                    let prev = self
                        .ops
                        .iter()
                        .find(|p| p.job == job.id && p.pos == pos - 1)
                        .ok_or(ScheduleError::MissingOperation {
                            job: job.id,
                            pos: pos - 1,
                        })?;
                    if op.start < prev.end() {
                        return Err(ScheduleError::RoutingOrderViolated { job: job.id, pos });
                    }
                }
            }
        }
        if self.ops.len() != expected {
            return Err(ScheduleError::ExtraOperations {
                expected,
                found: self.ops.len(),
            });
        }
        for m in 0..instance.machine_count {
            let mut on_machine: Vec<&ScheduledOp> =
                self.ops.iter().filter(|op| op.machine == m).collect();
            on_machine.sort_by_key(|op| op.start);
            for pair in on_machine.windows(2) {
                if pair[1].start < pair[0].end() {
                    return Err(ScheduleError::MachineOverlap {
                        machine: m,
                        first: pair[0].job,
                        second: pair[1].job,
                    });
                }
            }
            let order: Vec<JobId> = on_machine.iter().map(|op| op.job).collect();
            if order != self.machine_sequences[m] {
                return Err(ScheduleError::SequenceMismatch { machine: m });
            }
            for op in &on_machine {
                for b in instance.breakdowns_on(m) {
                    if op.start < b.end && b.start < op.end() {
                        return Err(ScheduleError::BreakdownOverlap {
                            machine: m,
                            job: op.job,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("machine {machine} sequence is not a permutation of its job set")]
    BadPermutation { machine: usize },
    #[error("expected {expected} machine sequences, found {found}")]
    WrongMachineCount { expected: usize, found: usize },
    #[error("operation (job {job}, pos {pos}) is missing")]
    MissingOperation { job: JobId, pos: usize },
    #[error("schedule holds {found} operations, instance routes {expected}")]
    ExtraOperations { expected: usize, found: usize },
    #[error("operation (job {job}, pos {pos}) disagrees with the routing")]
    RoutingMismatch { job: JobId, pos: usize },
    #[error("job {job} operation {pos} starts before the job's release")]
    ReleaseViolated { job: JobId, pos: usize },
    #[error("job {job} operation {pos} starts before its routing predecessor ends")]
    RoutingOrderViolated { job: JobId, pos: usize },
    #[error("jobs {first} and {second} overlap on machine {machine}")]
    MachineOverlap {
        machine: usize,
        first: JobId,
        second: JobId,
    },
    #[error("operations on machine {machine} do not follow the recorded sequence")]
    SequenceMismatch { machine: usize },
    #[error("job {job} intersects a breakdown window on machine {machine}")]
    BreakdownOverlap { machine: usize, job: JobId },
}

fn check_permutation(
    instance: &Instance,
    machine: usize,
    seq: &[JobId],
) -> Result<(), ScheduleError> {
    let mut expected = instance.jobs_on_machine(machine);
    let mut given = seq.to_vec();
    expected.sort_unstable();
    given.sort_unstable();
    if expected != given {
        return Err(ScheduleError::BadPermutation { machine });
    }
    Ok(())
}

/// Earliest `t >= lower` such that `[t, t + duration)` avoids every window.
fn earliest_clear_start(lower: Time, duration: Time, windows: &[Breakdown]) -> Time {
    let mut t = lower;
    let mut moved = true;
    while moved {
        moved = false;
        for w in windows {
            if t < w.end && w.start < t + duration {
                t = w.end;
                moved = true;
            }
        }
    }
    t
}

/// Decodes per-machine job orders into a semi-active schedule. Each
/// sequence must be a permutation of the jobs visiting that machine.
pub fn decode(instance: &Instance, sequences: &[Vec<JobId>]) -> Result<Schedule, ScheduleError> {
    if sequences.len() != instance.machine_count {
        return Err(ScheduleError::WrongMachineCount {
            expected: instance.machine_count,
            found: sequences.len(),
        });
    }
    for (m, seq) in sequences.iter().enumerate() {
        check_permutation(instance, m, seq)?;
    }
    Ok(decode_subsets(instance, sequences))
}

/// List-scheduling core shared by [`decode`] and partial-sequence
/// evaluation. Sequences may list only a subset of each machine's jobs;
/// routing steps whose machine does not list the job are skipped, so the
/// listed operations of a job still run in routing order. With complete
/// permutations this is exactly semi-active decoding.
pub(crate) fn decode_subsets(instance: &Instance, sequences: &[Vec<JobId>]) -> Schedule {
    let machine_count = instance.machine_count;
    let windows: Vec<Vec<Breakdown>> = (0..machine_count)
        .map(|m| instance.breakdowns_on(m))
        .collect();

    // Per job, the routing positions actually listed on their machines.
    let listed: Vec<Vec<usize>> = instance
        .jobs
        .iter()
        .map(|job| {
            job.routing
                .iter()
                .enumerate()
                .filter(|(_, op)| sequences[op.machine].contains(&job.id))
                .map(|(pos, _)| pos)
                .collect()
        })
        .collect();

    let mut remaining: Vec<Vec<JobId>> = sequences.to_vec();
    let mut actual: Vec<Vec<JobId>> = vec![Vec::new(); machine_count];
    let mut machine_free: Vec<Time> = vec![0; machine_count];
    let mut job_step: Vec<usize> = vec![0; instance.jobs.len()];
    let mut job_ready: Vec<Time> = instance.jobs.iter().map(|j| j.release).collect();
    let mut ops = Vec::new();

    loop {
        // Job-ready operations, i.e. the next listed routing step of each
        // unfinished job.
        let mut in_order: Option<(usize, usize)> = None; // (job index, machine)
        let mut repair: Option<(usize, usize, usize)> = None; // (seq position, machine, job index)
        for (ji, job) in instance.jobs.iter().enumerate() {
            let step = job_step[ji];
            if step >= listed[ji].len() {
                continue;
            }
            let m = job.routing[listed[ji][step]].machine;
            match remaining[m].iter().position(|&id| id == job.id) {
                Some(0) => {
                    let better = match in_order {
                        None => true,
                        Some((_, best_m)) => m < best_m,
                    };
                    if better {
                        in_order = Some((ji, m));
                    }
                }
                Some(idx) => {
                    let better = match repair {
                        None => true,
                        Some((best_idx, best_m, _)) => (idx, m) < (best_idx, best_m),
                    };
                    if better {
                        repair = Some((idx, m, ji));
                    }
                }
                None => unreachable!("listed positions always appear in remaining"),
            }
        }

        let (ji, m, seq_idx) = match (in_order, repair) {
            (Some((ji, m)), _) => (ji, m, 0),
            (None, Some((idx, m, ji))) => (ji, m, idx),
            (None, None) => break,
        };

        let job = &instance.jobs[ji];
        let pos = listed[ji][job_step[ji]];
        let duration = job.routing[pos].duration;
        let lower = machine_free[m].max(job_ready[ji]);
        let start = earliest_clear_start(lower, duration, &windows[m]);

        // A repair pick at seq_idx > 0 moves the job to the front of the
        // machine's remaining order.
        remaining[m].remove(seq_idx);
        actual[m].push(job.id);
        machine_free[m] = start + duration;
        job_ready[ji] = start + duration;
        job_step[ji] += 1;
        ops.push(ScheduledOp {
            job: job.id,
            pos,
            machine: m,
            start,
            duration,
        });
    }

    ops.sort_by_key(|op| (op.machine, op.start, op.job));
    Schedule {
        machine_sequences: actual,
        ops,
    }
}
