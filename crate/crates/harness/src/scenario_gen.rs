//! Seeded scenario-suite generation for experiments: arrival shifts, new
//! jobs and machine breakdowns scaled to the instance at hand. Scenario 0
//! is always the identity, so every suite covers the undisturbed shop.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use aisched_core::instance::{Breakdown, Instance, Operation, Time};
use aisched_core::scenario::{NewJob, Scenario};
use aisched_core::seeding::derive_seed;

pub fn generate_scenarios(instance: &Instance, count: usize, seed: u64) -> Vec<Scenario> {
    let total: Time = instance
        .jobs
        .iter()
        .flat_map(|j| j.routing.iter())
        .map(|op| op.duration)
        .sum();
    let op_count: Time = instance
        .jobs
        .iter()
        .map(|j| j.routing.len() as Time)
        .sum();
    let avg = (total / op_count.max(1)).max(1);
    // Rough horizon: per-machine load.
    let horizon = (total / instance.machine_count as Time).max(1);
    let (lo, hi) = instance
        .jobs
        .iter()
        .flat_map(|j| j.routing.iter())
        .fold((Time::MAX, 1), |(lo, hi), op| {
            (lo.min(op.duration), hi.max(op.duration))
        });

    let mut scenarios = vec![Scenario::default()];
    for i in 1..count {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
        let mut scenario = Scenario::default();
        for job in &instance.jobs {
            if rng.random_bool(0.35) {
                let delta = loop {
                    let d = rng.random_range(-(2 * avg as i64)..=3 * avg as i64);
                    if d != 0 {
                        break d;
                    }
                };
                scenario.arrival_shifts.insert(job.id, delta);
            }
        }
        if rng.random_bool(0.4) {
            let mut order: Vec<usize> = (0..instance.machine_count).collect();
            order.shuffle(&mut rng);
            let routing = order
                .into_iter()
                .map(|machine| Operation {
                    machine,
                    duration: rng.random_range(lo..=hi),
                })
                .collect();
            scenario.new_jobs.push(NewJob {
                routing,
                release: rng.random_range(0..=horizon / 2),
            });
        }
        if rng.random_bool(0.4) {
            let machine = rng.random_range(0..instance.machine_count);
            let start = rng.random_range(0..=horizon / 2);
            let len = rng.random_range(avg..=3 * avg);
            scenario.breakdowns.push(Breakdown {
                machine,
                start,
                end: start + len,
            });
        }
        scenarios.push(scenario);
    }
    scenarios
}

#[cfg(test)]
mod tests {
    use super::*;
    use aisched_core::instance::generate_instance;
    use aisched_core::scenario::apply_scenario;

    #[test]
    fn suite_starts_with_identity_and_is_deterministic() {
        let inst = generate_instance(3, 6, 3, (1, 9)).unwrap();
        let a = generate_scenarios(&inst, 8, 11);
        let b = generate_scenarios(&inst, 8, 11);
        assert_eq!(a, b);
        assert_eq!(a.len(), 8);
        assert!(a[0].is_identity());
        assert!(a.iter().skip(1).any(|s| !s.is_identity()));
    }

    #[test]
    fn generated_scenarios_apply_cleanly() {
        let inst = generate_instance(9, 10, 5, (1, 99)).unwrap();
        for scenario in generate_scenarios(&inst, 12, 5) {
            let perturbed = apply_scenario(&inst, &scenario).unwrap();
            assert!(perturbed.job_count() >= inst.job_count());
        }
    }
}
