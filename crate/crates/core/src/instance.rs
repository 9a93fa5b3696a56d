//! Job-shop problem instances: jobs, routings, release dates and
//! machine breakdown windows, plus the plain-text loader and a seeded
//! generator for desk-scale experiments.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Job identifier. Jobs are numbered from 1; 0 is never a valid id.
pub type JobId = u32;

/// Abstract time unit used for durations, releases and start times.
pub type Time = u64;

/// One routing step: the machine a job visits and for how long.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operation {
    pub machine: usize,
    pub duration: Time,
}

/// A job: its id, machine routing in processing order, and arrival date.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    pub id: JobId,
    pub routing: Vec<Operation>,
    #[serde(default)]
    pub release: Time,
}

/// A half-open window `[start, end)` during which a machine is down.
/// Operations are non-preemptive and must not intersect the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Breakdown {
    pub machine: usize,
    pub start: Time,
    pub end: Time,
}

/// A job-shop instance. Breakdown windows are empty on freshly parsed or
/// generated instances; scenario application attaches them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub jobs: Vec<Job>,
    pub machine_count: usize,
    #[serde(default)]
    pub breakdowns: Vec<Breakdown>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("instance has no jobs")]
    NoJobs,
    #[error("instance has no machines")]
    NoMachines,
    #[error("job id 0 is reserved")]
    ZeroJobId,
    #[error("duplicate job id {0}")]
    DuplicateJobId(JobId),
    #[error("job {0} has an empty routing")]
    EmptyRouting(JobId),
    #[error("job {job} visits machine {machine} more than once")]
    DuplicateMachine { job: JobId, machine: usize },
    #[error("job {job} references machine {machine}, but only {count} machines exist")]
    BadMachineIndex { job: JobId, machine: usize, count: usize },
    #[error("job {0} has a zero-length operation")]
    ZeroDuration(JobId),
    #[error("breakdown on machine {machine} has start {start} >= end {end}")]
    BadBreakdownWindow { machine: usize, start: Time, end: Time },
    #[error("breakdown references machine {machine}, but only {count} machines exist")]
    BadBreakdownMachine { machine: usize, count: usize },
}

impl Instance {
    /// Builds an instance, checking every structural invariant.
    pub fn new(
        jobs: Vec<Job>,
        machine_count: usize,
        breakdowns: Vec<Breakdown>,
    ) -> Result<Self, InstanceError> {
        if jobs.is_empty() {
            return Err(InstanceError::NoJobs);
        }
        if machine_count == 0 {
            return Err(InstanceError::NoMachines);
        }
        let mut seen_ids = BTreeSet::new();
        for job in &jobs {
            if job.id == 0 {
                return Err(InstanceError::ZeroJobId);
            }
            if !seen_ids.insert(job.id) {
                return Err(InstanceError::DuplicateJobId(job.id));
            }
            if job.routing.is_empty() {
                return Err(InstanceError::EmptyRouting(job.id));
            }
            let mut visited = BTreeSet::new();
            for op in &job.routing {
                if op.machine >= machine_count {
                    return Err(InstanceError::BadMachineIndex {
                        job: job.id,
                        machine: op.machine,
                        count: machine_count,
                    });
                }
                if !visited.insert(op.machine) {
                    return Err(InstanceError::DuplicateMachine {
                        job: job.id,
                        machine: op.machine,
                    });
                }
                if op.duration == 0 {
                    return Err(InstanceError::ZeroDuration(job.id));
                }
            }
        }
        for b in &breakdowns {
            if b.machine >= machine_count {
                return Err(InstanceError::BadBreakdownMachine {
                    machine: b.machine,
                    count: machine_count,
                });
            }
            if b.start >= b.end {
                return Err(InstanceError::BadBreakdownWindow {
                    machine: b.machine,
                    start: b.start,
                    end: b.end,
                });
            }
        }
        let mut jobs = jobs;
        jobs.sort_by_key(|j| j.id);
        Ok(Instance {
            jobs,
            machine_count,
            breakdowns,
        })
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    pub fn job(&self, id: JobId) -> Option<&Job> {
        self.jobs
            .binary_search_by_key(&id, |j| j.id)
            .ok()
            .map(|i| &self.jobs[i])
    }

    /// All job ids, ascending.
    pub fn job_ids(&self) -> Vec<JobId> {
        self.jobs.iter().map(|j| j.id).collect()
    }

    /// Jobs visiting machine `m`, in ascending id order.
    pub fn jobs_on_machine(&self, m: usize) -> Vec<JobId> {
        self.jobs
            .iter()
            .filter(|j| j.routing.iter().any(|op| op.machine == m))
            .map(|j| j.id)
            .collect()
    }

    /// Breakdown windows attached to machine `m`, sorted by start.
    pub fn breakdowns_on(&self, m: usize) -> Vec<Breakdown> {
        let mut v: Vec<Breakdown> = self
            .breakdowns
            .iter()
            .copied()
            .filter(|b| b.machine == m)
            .collect();
        v.sort_by_key(|b| (b.start, b.end));
        v
    }

    /// Renders the instance in the plain-text file format accepted by
    /// [`parse_instance`]. The releases line is omitted when all zero.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.jobs.len(), self.machine_count);
        for job in &self.jobs {
            let line: Vec<String> = job
                .routing
                .iter()
                .map(|op| format!("{} {}", op.machine, op.duration))
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        if self.jobs.iter().any(|j| j.release != 0) {
            let rel: Vec<String> = self.jobs.iter().map(|j| j.release.to_string()).collect();
            out.push_str(&format!("releases {}\n", rel.join(" ")));
        }
        out
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("malformed header: expected `J M` on line 1")]
    MalformedHeader,
    #[error("job {job} declares fewer operations than the {expected} machines")]
    MissingOperations { job: usize, expected: usize },
    #[error("job {job} declares more operations than the {expected} machines")]
    ExtraOperations { job: usize, expected: usize },
    #[error("job {job} references machine {machine} outside 0..{count}")]
    BadMachineIndex { job: usize, machine: usize, count: usize },
    #[error("unreadable token on line {line}")]
    InvalidToken { line: usize },
    #[error("missing job line {job}")]
    MissingJobLine { job: usize },
    #[error("releases line must hold exactly {expected} values")]
    MalformedReleases { expected: usize },
    #[error("unexpected trailing line {line}")]
    TrailingLine { line: usize },
    #[error(transparent)]
    Invalid(#[from] InstanceError),
}

/// Parses the plain-text instance format: line 1 `J M`, then J lines of
/// M whitespace-separated `machine duration` pairs in routing order, then
/// an optional `releases r1 .. rJ` line. Jobs are numbered 1..=J in file
/// order; releases default to 0.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_no, header) = lines.next().ok_or(ParseError::MalformedHeader)?;
    let mut head = header.split_whitespace();
    let job_count: usize = head
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(ParseError::MalformedHeader)?;
    let machine_count: usize = head
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(ParseError::MalformedHeader)?;
    if head.next().is_some() || job_count == 0 || machine_count == 0 {
        let _ = header_no;
        return Err(ParseError::MalformedHeader);
    }

    let mut jobs = Vec::with_capacity(job_count);
    for j in 1..=job_count {
        let (line_no, line) = lines.next().ok_or(ParseError::MissingJobLine { job: j })?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let pairs = tokens.len() / 2;
        if !tokens.len().is_multiple_of(2) || pairs < machine_count {
            return Err(ParseError::MissingOperations {
                job: j,
                expected: machine_count,
            });
        }
        if pairs > machine_count {
            return Err(ParseError::ExtraOperations {
                job: j,
                expected: machine_count,
            });
        }
        let mut routing = Vec::with_capacity(pairs);
        for pair in tokens.chunks(2) {
            let machine: usize = pair[0]
                .parse()
                .map_err(|_| ParseError::InvalidToken { line: line_no })?;
            let duration: Time = pair[1]
                .parse()
                .map_err(|_| ParseError::InvalidToken { line: line_no })?;
            if machine >= machine_count {
                return Err(ParseError::BadMachineIndex {
                    job: j,
                    machine,
                    count: machine_count,
                });
            }
            routing.push(Operation { machine, duration });
        }
        jobs.push(Job {
            id: j as JobId,
            routing,
            release: 0,
        });
    }

    if let Some((line_no, line)) = lines.next() {
        let mut tokens = line.split_whitespace();
        if tokens.next() != Some("releases") {
            return Err(ParseError::TrailingLine { line: line_no });
        }
        let values: Vec<&str> = tokens.collect();
        if values.len() != job_count {
            return Err(ParseError::MalformedReleases {
                expected: job_count,
            });
        }
        for (job, v) in jobs.iter_mut().zip(values) {
            job.release = v
                .parse()
                .map_err(|_| ParseError::InvalidToken { line: line_no })?;
        }
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(ParseError::TrailingLine { line: line_no });
    }

    Ok(Instance::new(jobs, machine_count, Vec::new())?)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenerateError {
    #[error("instance must have at least one job and one machine")]
    InvalidSize,
    #[error("duration range requires 1 <= lo <= hi, got [{lo}, {hi}]")]
    InvalidRange { lo: Time, hi: Time },
}

/// Generates a seeded random instance: every job visits all `machines` in
/// a random order with durations uniform in `[lo, hi]`. Deterministic for
/// a given seed.
pub fn generate_instance(
    seed: u64,
    jobs: usize,
    machines: usize,
    duration_range: (Time, Time),
) -> Result<Instance, GenerateError> {
    let (lo, hi) = duration_range;
    if jobs == 0 || machines == 0 {
        return Err(GenerateError::InvalidSize);
    }
    if lo == 0 || lo > hi {
        return Err(GenerateError::InvalidRange { lo, hi });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(jobs);
    for j in 1..=jobs {
        let mut order: Vec<usize> = (0..machines).collect();
        order.shuffle(&mut rng);
        let routing = order
            .into_iter()
            .map(|machine| Operation {
                machine,
                duration: rng.random_range(lo..=hi),
            })
            .collect();
        out.push(Job {
            id: j as JobId,
            routing,
            release: 0,
        });
    }
    Ok(Instance::new(out, machines, Vec::new()).expect("generated instance is well-formed"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_operation_instance() {
        let inst = parse_instance("1 1\n0 5").unwrap();
        assert_eq!(inst.job_count(), 1);
        assert_eq!(inst.machine_count, 1);
        assert_eq!(
            inst.jobs[0].routing,
            vec![Operation {
                machine: 0,
                duration: 5
            }]
        );
        assert_eq!(inst.jobs[0].release, 0);
    }

    #[test]
    fn parses_two_by_two() {
        let inst = parse_instance("2 2\n0 3 1 2\n1 4 0 1").unwrap();
        assert_eq!(inst.job_count(), 2);
        let j1 = inst.job(1).unwrap();
        let j2 = inst.job(2).unwrap();
        assert_eq!(
            j1.routing,
            vec![
                Operation {
                    machine: 0,
                    duration: 3
                },
                Operation {
                    machine: 1,
                    duration: 2
                },
            ]
        );
        assert_eq!(
            j2.routing,
            vec![
                Operation {
                    machine: 1,
                    duration: 4
                },
                Operation {
                    machine: 0,
                    duration: 1
                },
            ]
        );
    }

    #[test]
    fn rejects_short_job_line() {
        let err = parse_instance("2 2\n0 3").unwrap_err();
        assert_eq!(
            err,
            ParseError::MissingOperations {
                job: 1,
                expected: 2
            }
        );
    }

    #[test]
    fn rejects_bad_header() {
        assert_eq!(parse_instance("").unwrap_err(), ParseError::MalformedHeader);
        assert_eq!(
            parse_instance("x 2\n0 1").unwrap_err(),
            ParseError::MalformedHeader
        );
        assert_eq!(
            parse_instance("0 2").unwrap_err(),
            ParseError::MalformedHeader
        );
    }

    #[test]
    fn rejects_bad_machine_index() {
        let err = parse_instance("1 2\n0 3 2 4").unwrap_err();
        assert_eq!(
            err,
            ParseError::BadMachineIndex {
                job: 1,
                machine: 2,
                count: 2
            }
        );
    }

    #[test]
    fn parses_releases_line() {
        let inst = parse_instance("2 1\n0 3\n0 4\nreleases 7 0").unwrap();
        assert_eq!(inst.job(1).unwrap().release, 7);
        assert_eq!(inst.job(2).unwrap().release, 0);
    }

    #[test]
    fn rejects_short_releases_line() {
        let err = parse_instance("2 1\n0 3\n0 4\nreleases 7").unwrap_err();
        assert_eq!(err, ParseError::MalformedReleases { expected: 2 });
    }

    #[test]
    fn text_round_trip() {
        let inst = generate_instance(3, 4, 3, (1, 9)).unwrap();
        let again = parse_instance(&inst.to_text()).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let a = generate_instance(42, 10, 5, (1, 99)).unwrap();
        let b = generate_instance(42, 10, 5, (1, 99)).unwrap();
        assert_eq!(a, b);
        let c = generate_instance(43, 10, 5, (1, 99)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generation_rejects_empty_dimensions() {
        assert_eq!(
            generate_instance(7, 0, 3, (1, 9)).unwrap_err(),
            GenerateError::InvalidSize
        );
        assert_eq!(
            generate_instance(7, 3, 0, (1, 9)).unwrap_err(),
            GenerateError::InvalidSize
        );
        assert_eq!(
            generate_instance(7, 3, 3, (5, 2)).unwrap_err(),
            GenerateError::InvalidRange { lo: 5, hi: 2 }
        );
    }

    #[test]
    fn generated_routings_are_machine_permutations() {
        let inst = generate_instance(11, 6, 4, (1, 9)).unwrap();
        for job in &inst.jobs {
            let mut machines: Vec<usize> = job.routing.iter().map(|o| o.machine).collect();
            machines.sort_unstable();
            assert_eq!(machines, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn instance_validation_catches_duplicates() {
        let job = |id| Job {
            id,
            routing: vec![Operation {
                machine: 0,
                duration: 1,
            }],
            release: 0,
        };
        let err = Instance::new(vec![job(1), job(1)], 1, Vec::new()).unwrap_err();
        assert_eq!(err, InstanceError::DuplicateJobId(1));
    }
}
