//! Immune-loop properties: winner-take-score bookkeeping, system-fitness
//! monotonicity under inclusion for equal-length repertoires, and
//! feasibility of every schedule recombined from random populations.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use aisched_core::ais::{
    assign_antibody_fitness, build_schedule, system_fitness, AntibodyPopulation, AntigenUniverse,
};
use aisched_core::instance::{generate_instance, JobId};
use aisched_core::matching::{match_score, Antibody, Antigen, Symbol};

fn random_antigen(rng: &mut ChaCha8Rng, max_id: JobId, len: usize) -> Antigen {
    let mut ids: Vec<JobId> = (1..=max_id).collect();
    ids.shuffle(rng);
    ids.truncate(len);
    Antigen::new(ids, 0, 0).unwrap()
}

fn random_antibody(rng: &mut ChaCha8Rng, max_id: JobId, len: usize, wildcard: f64) -> Antibody {
    let mut ids: Vec<JobId> = (1..=max_id).collect();
    ids.shuffle(rng);
    let symbols = ids
        .into_iter()
        .take(len)
        .map(|id| {
            if rng.random_bool(wildcard) {
                Symbol::Wildcard
            } else {
                Symbol::Job(id)
            }
        })
        .collect();
    Antibody::new(symbols).unwrap()
}

#[test]
fn exactly_one_antibody_gains_exactly_the_max_score() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF17);
    for case in 0..1_000 {
        let glen = rng.random_range(7..=12);
        let antigen = random_antigen(&mut rng, 15, glen);
        let antibodies: Vec<Antibody> = (0..rng.random_range(1..=8))
            .map(|_| {
                let blen = rng.random_range(2..=6);
                random_antibody(&mut rng, 15, blen, 0.2)
            })
            .collect();
        let expected_max = antibodies
            .iter()
            .map(|b| match_score(b, &antigen).unwrap())
            .max()
            .unwrap();

        let mut population = AntibodyPopulation::new(antibodies);
        assign_antibody_fitness(&mut population, &[&antigen], &mut rng).unwrap();

        let gainers: Vec<u64> = population
            .fitness
            .iter()
            .copied()
            .filter(|&f| f > 0)
            .collect();
        if expected_max == 0 {
            assert!(gainers.is_empty(), "case {case}: nothing to award");
        } else {
            assert_eq!(gainers, vec![expected_max], "case {case}");
        }
        assert_eq!(
            population.fitness.iter().sum::<u64>(),
            expected_max,
            "case {case}"
        );
    }
}

#[test]
fn fitness_accumulates_across_a_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5A);
    let antigens: Vec<Antigen> = (0..6)
        .map(|_| {
            let glen = rng.random_range(7..=10);
            random_antigen(&mut rng, 12, glen)
        })
        .collect();
    let sample: Vec<&Antigen> = antigens.iter().collect();
    let antibodies: Vec<Antibody> = (0..5)
        .map(|_| random_antibody(&mut rng, 12, 3, 0.2))
        .collect();
    let per_antigen_max: u64 = antigens
        .iter()
        .map(|g| {
            antibodies
                .iter()
                .map(|b| match_score(b, g).unwrap())
                .max()
                .unwrap()
        })
        .sum();
    let mut population = AntibodyPopulation::new(antibodies);
    assign_antibody_fitness(&mut population, &sample, &mut rng).unwrap();
    assert_eq!(population.fitness.iter().sum::<u64>(), per_antigen_max);
}

#[test]
fn adding_same_length_antibodies_never_hurts_system_fitness() {
    // With one shared antibody length, the top scorer is also the deficit
    // minimizer, so enlarging the repertoire cannot raise the mean.
    let mut rng = ChaCha8Rng::seed_from_u64(0x90);
    for _ in 0..500 {
        let universe = AntigenUniverse::from_antigens(
            (0..rng.random_range(1..=5))
                .map(|i| {
                    let glen = rng.random_range(6..=10);
                    let mut g = random_antigen(&mut rng, 12, glen);
                    g.scenario_id = i;
                    g
                })
                .collect(),
        );
        let len = rng.random_range(1..=4);
        let mut set: Vec<Antibody> = (0..rng.random_range(1..=4))
            .map(|_| random_antibody(&mut rng, 12, len, 0.2))
            .collect();
        let before = system_fitness(&universe, &set).unwrap();
        set.push(random_antibody(&mut rng, 12, len, 0.2));
        let after = system_fitness(&universe, &set).unwrap();
        assert!(
            after <= before,
            "inclusion raised mean deficit: {before} -> {after}"
        );
    }
}

#[test]
fn five_hundred_random_populations_build_feasible_schedules() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xB111D);
    for case in 0..500 {
        let jobs = rng.random_range(1..=7);
        let machines = rng.random_range(1..=4);
        let instance = generate_instance(rng.random(), jobs, machines, (1, 9)).unwrap();
        // Job ids partly off-instance to exercise the placement filter.
        let antibodies: Vec<Antibody> = (0..rng.random_range(1..=6))
            .map(|_| {
                let blen = rng.random_range(1..=jobs.max(2));
                random_antibody(&mut rng, (jobs as JobId) + 3, blen, 0.25)
            })
            .collect();
        let mut population = AntibodyPopulation::new(antibodies);
        for f in population.fitness.iter_mut() {
            *f = rng.random_range(0..40);
        }
        let schedule = build_schedule(&population, &instance).unwrap();
        schedule
            .validate(&instance)
            .unwrap_or_else(|e| panic!("case {case}: {e}"));
    }
}
