//! The immune-system loop: antigen universe construction, winner-take-score
//! antibody fitness, system fitness, antibody evolution, and recombination
//! of antibodies into complete schedules.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ga::{
    self, swap_mutation, CrossoverOp, GaConfig, GaError, GaOutcome, GenerationStats,
};
use crate::instance::{Instance, JobId};
use crate::library::{GeneLibrary, LibraryError};
use crate::matching::{
    antigen_deficit, match_score, Antibody, Antigen, MatchError,
};
use crate::scenario::{apply_scenario, Scenario, ScenarioError};
use crate::schedule::{decode, decode_subsets, Schedule, ScheduleError};
use crate::seeding::derive_seed;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AisError {
    #[error("antigen sample is empty or exceeds the universe")]
    EmptySample,
    #[error("antigen universe is empty")]
    EmptyUniverse,
    #[error("scenario list is empty")]
    NoScenarios,
    #[error("antibody population is empty")]
    EmptyPopulation,
    #[error(
        "antibodies of length {antibody} cannot be matched against antigens of length {antigen}"
    )]
    AntibodyTooLong { antibody: usize, antigen: usize },
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Ga(#[from] GaError),
    #[error(transparent)]
    Library(#[from] LibraryError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// All antigens gathered across a scenario suite. Hand-built universes
/// (for focused experiments) may leave `scenarios` empty.
#[derive(Debug, Clone, PartialEq)]
pub struct AntigenUniverse {
    pub antigens: Vec<Antigen>,
    pub scenarios: Vec<Scenario>,
}

impl AntigenUniverse {
    pub fn from_antigens(antigens: Vec<Antigen>) -> Self {
        AntigenUniverse {
            antigens,
            scenarios: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.antigens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.antigens.is_empty()
    }

    pub fn shortest_antigen_len(&self) -> Option<usize> {
        self.antigens.iter().map(|a| a.len()).min()
    }
}

/// An antibody population with its accumulated match-score fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct AntibodyPopulation {
    pub antibodies: Vec<Antibody>,
    pub fitness: Vec<u64>,
}

impl AntibodyPopulation {
    pub fn new(antibodies: Vec<Antibody>) -> Self {
        let fitness = vec![0; antibodies.len()];
        AntibodyPopulation {
            antibodies,
            fitness,
        }
    }

    pub fn len(&self) -> usize {
        self.antibodies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.antibodies.is_empty()
    }

    pub fn reset_fitness(&mut self) {
        self.fitness.iter_mut().for_each(|f| *f = 0);
    }

    /// Antibody indices sorted by descending fitness, ties to the lower
    /// index; the order recombination walks the population in.
    pub fn by_descending_fitness(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(self.fitness[i]), i));
        order
    }

    /// One antibody per line in the matching text form, with fitness.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (antibody, fitness) in self.antibodies.iter().zip(&self.fitness) {
            out.push_str(&format!("{antibody} {fitness}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, MatchError> {
        let mut antibodies = Vec::new();
        let mut fitness = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (seq, fit) = line
                .rsplit_once(' ')
                .ok_or_else(|| MatchError::Unparseable(line.to_string()))?;
            antibodies.push(seq.trim().parse()?);
            fitness.push(
                fit.trim()
                    .parse()
                    .map_err(|_| MatchError::Unparseable(line.to_string()))?,
            );
        }
        Ok(AntibodyPopulation {
            antibodies,
            fitness,
        })
    }
}

/// A full sequence set: one job ordering per machine. The permutation
/// genome evolved when searching for schedules.
pub type SequenceSet = Vec<Vec<JobId>>;

/// Uniformly random machine orders for an instance.
pub fn random_sequence_set(instance: &Instance, rng: &mut ChaCha8Rng) -> SequenceSet {
    (0..instance.machine_count)
        .map(|m| {
            let mut jobs = instance.jobs_on_machine(m);
            jobs.shuffle(rng);
            jobs
        })
        .collect()
}

fn sequence_set_crossover(
    op: CrossoverOp,
    a: &SequenceSet,
    b: &SequenceSet,
    rng: &mut ChaCha8Rng,
) -> SequenceSet {
    a.iter()
        .zip(b)
        .map(|(sa, sb)| match op.for_permutations() {
            CrossoverOp::OrderBased => ga::order_based_crossover(sa, sb, rng),
            CrossoverOp::TwoPoint => ga::two_point_crossover(sa, sb, rng),
            CrossoverOp::Overlap => unreachable!("mapped away by for_permutations"),
        })
        .map(|r| r.expect("machine sequences share a job set"))
        .collect()
}

fn sequence_set_swap(seqs: &mut SequenceSet, rng: &mut ChaCha8Rng) {
    if seqs.is_empty() {
        return;
    }
    let m = rng.random_range(0..seqs.len());
    swap_mutation(&mut seqs[m], rng);
}

/// Evolves machine sequences for one instance under makespan, returning
/// the decoded best schedule and the GA trace. This one search powers
/// both antigen-universe construction and the GA baseline.
pub fn evolve_schedule(
    instance: &Instance,
    config: &GaConfig,
    crossover: CrossoverOp,
) -> Result<(Schedule, Vec<GenerationStats>), AisError> {
    config.validate()?;
    let mut init_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 0x5eed));
    let initial: Vec<SequenceSet> = (0..config.population_size)
        .map(|_| random_sequence_set(instance, &mut init_rng))
        .collect();
    let outcome: GaOutcome<SequenceSet> = ga::run_ga(
        config,
        initial,
        |seqs| {
            let sched = decode_subsets(instance, seqs);
            -(sched.makespan() as f64)
        },
        |a, b, rng| sequence_set_crossover(crossover, a, b, rng),
        sequence_set_swap,
    )?;
    let schedule = decode(instance, &outcome.best)?;
    Ok((schedule, outcome.trace))
}

/// Builds the antigen universe: for each scenario, apply it, evolve a
/// schedule with the GA, and turn each machine sequence of the best
/// decoded schedule into one antigen tagged with the scenario index.
///
/// The scenario at index `i` runs under `derive_seed(config.seed, i)`, so
/// a single scenario's search can be replayed in isolation.
pub fn build_antigen_universe(
    instance: &Instance,
    scenarios: &[Scenario],
    config: &GaConfig,
    crossover: CrossoverOp,
) -> Result<AntigenUniverse, AisError> {
    if scenarios.is_empty() {
        return Err(AisError::NoScenarios);
    }
    let mut antigens = Vec::with_capacity(scenarios.len() * instance.machine_count);
    for (scenario_id, scenario) in scenarios.iter().enumerate() {
        let perturbed = apply_scenario(instance, scenario)?;
        let per_scenario = config.with_seed(derive_seed(config.seed, scenario_id as u64));
        let (schedule, _) = evolve_schedule(&perturbed, &per_scenario, crossover)?;
        for (machine, sequence) in schedule.machine_sequences.iter().enumerate() {
            antigens.push(Antigen::new(sequence.clone(), machine, scenario_id)?);
        }
    }
    Ok(AntigenUniverse {
        antigens,
        scenarios: scenarios.to_vec(),
    })
}

/// Winner-take-score fitness: for each sampled antigen every antibody is
/// scored, and exactly one highest scorer (ties broken uniformly at
/// random) has that score added to its fitness. Scores accumulate onto
/// whatever fitness the population already carries.
pub fn assign_antibody_fitness(
    population: &mut AntibodyPopulation,
    sample: &[&Antigen],
    rng: &mut ChaCha8Rng,
) -> Result<(), AisError> {
    if sample.is_empty() {
        return Err(AisError::EmptySample);
    }
    if population.is_empty() {
        return Err(AisError::EmptyPopulation);
    }
    for antigen in sample {
        let mut scores = Vec::with_capacity(population.len());
        for antibody in &population.antibodies {
            if antibody.len() >= antigen.len() {
                return Err(AisError::AntibodyTooLong {
                    antibody: antibody.len(),
                    antigen: antigen.len(),
                });
            }
            scores.push(match_score(antibody, antigen)?);
        }
        let best = *scores.iter().max().expect("non-empty population");
        let contenders: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] == best).collect();
        let winner = if contenders.len() == 1 {
            contenders[0]
        } else {
            contenders[rng.random_range(0..contenders.len())]
        };
        population.fitness[winner] += best;
    }
    Ok(())
}

/// Mean antigen deficit across the whole universe; 0 means every antigen
/// is perfectly covered by its best-matching antibody.
pub fn system_fitness(
    universe: &AntigenUniverse,
    antibodies: &[Antibody],
) -> Result<f64, AisError> {
    if universe.is_empty() {
        return Err(AisError::EmptyUniverse);
    }
    if antibodies.is_empty() {
        return Err(AisError::Match(MatchError::EmptyAntibodySet));
    }
    let mut total = 0u64;
    for antigen in &universe.antigens {
        total += antigen_deficit(antigen, antibodies)?;
    }
    Ok(total as f64 / universe.len() as f64)
}

fn antibody_crossover(
    op: CrossoverOp,
    a: &Antibody,
    b: &Antibody,
    rng: &mut ChaCha8Rng,
) -> Result<Antibody, GaError> {
    match op.for_antibodies() {
        CrossoverOp::TwoPoint => ga::two_point_crossover_antibodies(a, b, rng),
        CrossoverOp::Overlap => Ok(ga::overlap_crossover(a, b)),
        CrossoverOp::OrderBased => unreachable!("mapped away by for_antibodies"),
    }
}

/// Right-truncates an antibody to `max_len` symbols.
fn truncate_antibody(antibody: Antibody, max_len: usize) -> Antibody {
    if antibody.len() <= max_len {
        return antibody;
    }
    Antibody::new(antibody.symbols()[..max_len].to_vec())
        .expect("prefix of a valid antibody is valid")
}

fn antibody_swap(antibody: &Antibody, rng: &mut ChaCha8Rng) -> Antibody {
    let mut symbols = antibody.symbols().to_vec();
    swap_mutation(&mut symbols, rng);
    Antibody::new(symbols).expect("swap preserves the symbol multiset")
}

/// Evolves an antibody population against the universe, starting from
/// antibodies expressed out of the gene libraries.
pub fn evolve_antibodies(
    libraries: &GeneLibrary,
    universe: &AntigenUniverse,
    config: &GaConfig,
    crossover: CrossoverOp,
    sample_size: usize,
) -> Result<(AntibodyPopulation, Vec<f64>), AisError> {
    config.validate()?;
    let shortest = universe
        .shortest_antigen_len()
        .ok_or(AisError::EmptyUniverse)?;
    if libraries.antibody_length() >= shortest {
        return Err(AisError::AntibodyTooLong {
            antibody: libraries.antibody_length(),
            antigen: shortest,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 0x1417));
    let initial: Result<Vec<Antibody>, LibraryError> = (0..config.population_size)
        .map(|_| {
            let indices = libraries.random_indices(&mut rng);
            libraries.express(&indices)
        })
        .collect();
    evolve_antibodies_from(initial?, universe, config, crossover, sample_size)
}

/// Evolution core shared by cold starts and warm restarts. Each
/// generation draws a fresh antigen sample, assigns winner-take-score
/// fitness, records system fitness over the full universe, and then
/// applies tournament selection, crossover, swap mutation and elitism.
/// Splice products longer than the shortest antigen are right-truncated.
pub fn evolve_antibodies_from(
    initial: Vec<Antibody>,
    universe: &AntigenUniverse,
    config: &GaConfig,
    crossover: CrossoverOp,
    sample_size: usize,
) -> Result<(AntibodyPopulation, Vec<f64>), AisError> {
    config.validate()?;
    if initial.is_empty() {
        return Err(AisError::EmptyPopulation);
    }
    let shortest = universe
        .shortest_antigen_len()
        .ok_or(AisError::EmptyUniverse)?;
    let max_len = shortest - 1;
    if max_len == 0
        || initial.iter().any(|a| a.len() > max_len)
    {
        let longest = initial.iter().map(|a| a.len()).max().unwrap_or(0);
        return Err(AisError::AntibodyTooLong {
            antibody: longest.max(1),
            antigen: shortest,
        });
    }
    if sample_size == 0 || sample_size > universe.len() {
        return Err(AisError::EmptySample);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut population = AntibodyPopulation::new(initial);
    let mut trace = Vec::with_capacity(config.generations + 1);

    for generation in 0..=config.generations {
        let sample_indices =
            rand::seq::index::sample(&mut rng, universe.len(), sample_size).into_vec();
        let sample: Vec<&Antigen> = sample_indices
            .iter()
            .map(|&i| &universe.antigens[i])
            .collect();
        population.reset_fitness();
        assign_antibody_fitness(&mut population, &sample, &mut rng)?;
        trace.push(system_fitness(universe, &population.antibodies)?);
        if generation == config.generations {
            break;
        }

        let scores: Vec<f64> = population.fitness.iter().map(|&f| f as f64).collect();
        let mut next = Vec::with_capacity(population.len());
        for &idx in &ga::elite_indices(&scores, config.elitism_count) {
            next.push(population.antibodies[idx].clone());
        }
        while next.len() < population.len() {
            let p1 = ga::tournament_select(&scores, config.tournament_size, &mut rng);
            let p2 = ga::tournament_select(&scores, config.tournament_size, &mut rng);
            let mut child = if rng.random_bool(config.crossover_rate) {
                antibody_crossover(
                    crossover,
                    &population.antibodies[p1],
                    &population.antibodies[p2],
                    &mut rng,
                )?
            } else {
                population.antibodies[p1].clone()
            };
            if rng.random_bool(config.mutation_rate) {
                child = antibody_swap(&child, &mut rng);
            }
            next.push(truncate_antibody(child, max_len));
        }
        population = AntibodyPopulation::new(next);
    }

    Ok((population, trace))
}

/// Splices two antibodies where `a1`'s suffix overlaps `a2`'s prefix on
/// the longest common contiguous run; `None` when no overlap of length
/// >= 1 exists. Duplicates after the splice degrade to wildcards.
pub fn somatic_recombination(a1: &Antibody, a2: &Antibody) -> Option<Antibody> {
    let s1 = a1.symbols();
    let s2 = a2.symbols();
    let max_overlap = s1.len().min(s2.len());
    for k in (1..=max_overlap).rev() {
        if s1[s1.len() - k..] == s2[..k] {
            let mut symbols = s1.to_vec();
            symbols.extend_from_slice(&s2[k..]);
            return Some(
                Antibody::new(crate::library::dedup_to_wildcards(symbols))
                    .expect("splice keeps the overlap run"),
            );
        }
    }
    None
}

/// Assembles partial machine sequences from antibodies: walking the
/// population by descending fitness (ties to the lower index), an
/// antibody's non-wildcard jobs are appended to a machine's partial
/// sequence only when every such job visits that machine and none is
/// already placed there.
pub fn simple_recombination(
    population: &AntibodyPopulation,
    instance: &Instance,
) -> Vec<Vec<JobId>> {
    let mut partial: Vec<Vec<JobId>> = vec![Vec::new(); instance.machine_count];
    let order = population.by_descending_fitness();
    for (m, placed) in partial.iter_mut().enumerate() {
        let machine_jobs = instance.jobs_on_machine(m);
        for &idx in &order {
            let jobs = population.antibodies[idx].jobs();
            if jobs.is_empty() {
                continue;
            }
            let placeable = jobs
                .iter()
                .all(|j| machine_jobs.contains(j) && !placed.contains(j));
            if placeable {
                placed.extend(jobs);
            }
        }
    }
    partial
}

/// Completes one machine's partial sequence by inserting each missing job
/// (ascending id) at the position minimizing the decoded makespan with
/// every other machine fixed to its current (possibly partial) sequence.
/// Ties go to the leftmost position.
pub fn single_job_addition(
    sequences: &SequenceSet,
    machine: usize,
    instance: &Instance,
) -> Vec<JobId> {
    let mut current = sequences.to_vec();
    let mut missing: Vec<JobId> = instance
        .jobs_on_machine(machine)
        .into_iter()
        .filter(|j| !current[machine].contains(j))
        .collect();
    missing.sort_unstable();
    for job in missing {
        let mut best_pos = 0;
        let mut best_makespan = None;
        for pos in 0..=current[machine].len() {
            let mut candidate = current.clone();
            candidate[machine].insert(pos, job);
            let makespan = decode_subsets(instance, &candidate).makespan();
            if best_makespan.is_none() || makespan < best_makespan.unwrap() {
                best_makespan = Some(makespan);
                best_pos = pos;
            }
        }
        current[machine].insert(best_pos, job);
    }
    current.swap_remove(machine)
}

/// Recombines an antibody population into a complete schedule:
/// simple recombination, then single-job addition machine by machine,
/// then decoding.
pub fn build_schedule(
    population: &AntibodyPopulation,
    instance: &Instance,
) -> Result<Schedule, AisError> {
    if population.is_empty() {
        return Err(AisError::EmptyPopulation);
    }
    let mut sequences = simple_recombination(population, instance);
    for m in 0..instance.machine_count {
        sequences[m] = single_job_addition(&sequences, m, instance);
    }
    Ok(decode(instance, &sequences)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;

    fn ab(s: &str) -> Antibody {
        s.parse().unwrap()
    }

    fn ag(s: &str) -> Antigen {
        s.parse().unwrap()
    }

    fn small_config(seed: u64) -> GaConfig {
        GaConfig {
            population_size: 8,
            generations: 10,
            crossover_rate: 0.9,
            mutation_rate: 0.3,
            tournament_size: 2,
            elitism_count: 1,
            seed,
        }
    }

    #[test]
    fn universe_counts_scenarios_times_machines() {
        let inst = parse_instance("3 2\n0 3 1 2\n1 4 0 1\n0 2 1 5").unwrap();
        let scenarios = vec![Scenario::default(); 3];
        let universe =
            build_antigen_universe(&inst, &scenarios, &small_config(2), CrossoverOp::OrderBased)
                .unwrap();
        assert_eq!(universe.len(), 6);
        for antigen in &universe.antigens {
            assert_eq!(antigen.len(), 3);
        }
    }

    #[test]
    fn universe_is_seed_deterministic() {
        let inst = parse_instance("3 2\n0 3 1 2\n1 4 0 1\n0 2 1 5").unwrap();
        let scenarios = vec![Scenario::default(); 2];
        let a = build_antigen_universe(&inst, &scenarios, &small_config(4), CrossoverOp::TwoPoint)
            .unwrap();
        let b = build_antigen_universe(&inst, &scenarios, &small_config(4), CrossoverOp::TwoPoint)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_job_instance_gives_unit_antigens() {
        let inst = parse_instance("1 2\n0 3 1 2").unwrap();
        let universe = build_antigen_universe(
            &inst,
            &[Scenario::default()],
            &small_config(1),
            CrossoverOp::OrderBased,
        )
        .unwrap();
        assert_eq!(universe.len(), 2);
        assert!(universe.antigens.iter().all(|a| a.len() == 1));
    }

    #[test]
    fn sole_antibody_collects_every_score() {
        let mut population = AntibodyPopulation::new(vec![ab("56789")]);
        let g1 = ag("984567132");
        let g2 = ag("567891234");
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assign_antibody_fitness(&mut population, &[&g1, &g2], &mut rng).unwrap();
        assert_eq!(population.fitness, vec![15 + 25]);
    }

    #[test]
    fn dominated_antibody_gains_nothing() {
        let mut population = AntibodyPopulation::new(vec![ab("984"), ab("76*")]);
        let g = ag("984567132");
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assign_antibody_fitness(&mut population, &[&g], &mut rng).unwrap();
        assert_eq!(population.fitness, vec![15, 0]);
    }

    #[test]
    fn tied_antibodies_have_one_seeded_winner() {
        let g = ag("984567132");
        let mut seen_first = false;
        let mut seen_second = false;
        for seed in 0..20 {
            let mut population = AntibodyPopulation::new(vec![ab("984"), ab("984")]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            assign_antibody_fitness(&mut population, &[&g], &mut rng).unwrap();
            let gains: Vec<u64> = population.fitness;
            assert_eq!(gains.iter().sum::<u64>(), 15);
            assert_eq!(gains.iter().filter(|&&f| f > 0).count(), 1);
            seen_first |= gains[0] > 0;
            seen_second |= gains[1] > 0;
        }
        assert!(seen_first && seen_second, "both outcomes should occur");
    }

    #[test]
    fn fitness_assignment_rejects_long_antibodies() {
        let mut population = AntibodyPopulation::new(vec![ab("123456789")]);
        let g = ag("984567132");
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = assign_antibody_fitness(&mut population, &[&g], &mut rng).unwrap_err();
        assert_eq!(
            err,
            AisError::AntibodyTooLong {
                antibody: 9,
                antigen: 9
            }
        );
    }

    #[test]
    fn system_fitness_examples() {
        let universe = AntigenUniverse::from_antigens(vec![ag("984567132")]);
        assert_eq!(system_fitness(&universe, &[ab("984")]).unwrap(), 0.0);
        assert_eq!(system_fitness(&universe, &[ab("56789")]).unwrap(), 10.0);
        let two = AntigenUniverse::from_antigens(vec![ag("984567132"), ag("984567132")]);
        assert_eq!(
            system_fitness(&two, &[ab("984"), ab("56789")]).unwrap(),
            0.0
        );
    }

    #[test]
    fn system_fitness_averages_deficits() {
        // "132" covers the first antigen perfectly (deficit 0) and is the
        // top scorer on the second with score 5 (deficit 10).
        let universe = AntigenUniverse::from_antigens(vec![ag("984567132"), ag("312456789")]);
        assert_eq!(system_fitness(&universe, &[ab("132")]).unwrap(), 5.0);
    }

    #[test]
    fn somatic_recombination_splices_on_overlap() {
        assert_eq!(
            somatic_recombination(&ab("567"), &ab("789")),
            Some(ab("56789"))
        );
        assert_eq!(somatic_recombination(&ab("12"), &ab("34")), None);
        let a = ab("123");
        assert_eq!(somatic_recombination(&a, &a), Some(a.clone()));
    }

    #[test]
    fn somatic_recombination_wildcards_duplicates() {
        // Overlap "3"; the suffix re-introduces 1, which must degrade.
        assert_eq!(
            somatic_recombination(&ab("123"), &ab("341")),
            Some(ab("1234*"))
        );
    }

    #[test]
    fn simple_recombination_places_by_fitness() {
        let inst = parse_instance("2 2\n0 3 1 2\n1 4 0 1").unwrap();
        let mut population = AntibodyPopulation::new(vec![ab("21"), ab("12")]);
        population.fitness = vec![10, 3];
        let partial = simple_recombination(&population, &inst);
        // The fitter antibody claims both machines; the other collides.
        assert_eq!(partial, vec![vec![2, 1], vec![2, 1]]);
    }

    /// Three jobs, two machines, with per-machine job sets that differ:
    /// job 1 only visits machine 0, job 3 only machine 1.
    fn split_instance() -> Instance {
        use crate::instance::{Job, Operation};
        let op = |machine, duration| Operation { machine, duration };
        Instance::new(
            vec![
                Job {
                    id: 1,
                    routing: vec![op(0, 2)],
                    release: 0,
                },
                Job {
                    id: 2,
                    routing: vec![op(0, 1), op(1, 4)],
                    release: 0,
                },
                Job {
                    id: 3,
                    routing: vec![op(1, 3)],
                    release: 0,
                },
            ],
            2,
            Vec::new(),
        )
        .unwrap()
    }

    #[test]
    fn simple_recombination_skips_foreign_jobs() {
        // Job 3 never visits machine 0, so an antibody naming it cannot
        // land there.
        let inst = split_instance();
        let mut population = AntibodyPopulation::new(vec![ab("12"), ab("23")]);
        population.fitness = vec![5, 4];
        let partial = simple_recombination(&population, &inst);
        assert_eq!(partial[0], vec![1, 2]);
        assert_eq!(partial[1], vec![2, 3]);
    }

    #[test]
    fn wholly_conflicting_population_leaves_empty_partials() {
        let inst = parse_instance("1 1\n0 5").unwrap();
        let population = AntibodyPopulation::new(vec![ab("2"), ab("3")]);
        let partial = simple_recombination(&population, &inst);
        assert_eq!(partial, vec![Vec::<JobId>::new()]);
    }

    #[test]
    fn single_job_addition_fills_empty_machine() {
        let inst = parse_instance("1 1\n0 5").unwrap();
        let completed = single_job_addition(&vec![Vec::new()], 0, &inst);
        assert_eq!(completed, vec![1]);
    }

    #[test]
    fn single_job_addition_is_identity_when_complete() {
        let inst = parse_instance("2 2\n0 3 1 2\n1 4 0 1").unwrap();
        let seqs = vec![vec![1, 2], vec![2, 1]];
        assert_eq!(single_job_addition(&seqs, 0, &inst), vec![1, 2]);
    }

    #[test]
    fn single_job_addition_matches_brute_force() {
        let inst = parse_instance("2 2\n0 3 1 2\n1 4 0 1").unwrap();
        let seqs = vec![vec![1], vec![2, 1]];
        let chosen = single_job_addition(&seqs, 0, &inst);
        // Exhaustive check of both insertion points.
        let mk = |order: Vec<JobId>| {
            decode(&inst, &[order, vec![2, 1]]).unwrap().makespan()
        };
        let front = mk(vec![2, 1]);
        let back = mk(vec![1, 2]);
        let best = front.min(back);
        assert_eq!(mk(chosen.clone()), best);
        assert_eq!(chosen, vec![1, 2]);
        assert_eq!(back, 6);
        assert_eq!(front, 10);
    }

    #[test]
    fn build_schedule_recovers_spelled_out_sequences() {
        // Per-machine job sets differ, so each antibody fits exactly one
        // machine.
        let inst = split_instance();
        let mut population = AntibodyPopulation::new(vec![ab("21"), ab("23")]);
        population.fitness = vec![9, 8];
        let sched = build_schedule(&population, &inst).unwrap();
        sched.validate(&inst).unwrap();
        assert_eq!(sched.machine_sequences[0], vec![2, 1]);
        assert_eq!(sched.machine_sequences[1], vec![2, 3]);
        let direct = decode(&inst, &[vec![2, 1], vec![2, 3]]).unwrap();
        assert_eq!(sched.makespan(), direct.makespan());
    }

    #[test]
    fn build_schedule_survives_useless_antibodies() {
        let inst = parse_instance("2 2\n0 3 1 2\n1 4 0 1").unwrap();
        let population = AntibodyPopulation::new(vec![ab("9"), ab("8")]);
        let sched = build_schedule(&population, &inst).unwrap();
        sched.validate(&inst).unwrap();
    }

    #[test]
    fn build_schedule_is_deterministic() {
        let inst = parse_instance("2 2\n0 3 1 2\n1 4 0 1").unwrap();
        let mut population = AntibodyPopulation::new(vec![ab("12"), ab("2*")]);
        population.fitness = vec![4, 4];
        let a = build_schedule(&population, &inst).unwrap();
        let b = build_schedule(&population, &inst).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn evolution_is_seed_deterministic() {
        let universe = AntigenUniverse::from_antigens(vec![ag("984567132"), ag("123456789")]);
        let libraries =
            GeneLibrary::init(3, 2, 3, 2, &(1..=9).collect::<Vec<_>>(), 0.1).unwrap();
        let config = small_config(6);
        let a = evolve_antibodies(&libraries, &universe, &config, CrossoverOp::TwoPoint, 2)
            .unwrap();
        let b = evolve_antibodies(&libraries, &universe, &config, CrossoverOp::TwoPoint, 2)
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.1.len(), config.generations + 1);
    }

    #[test]
    fn evolution_rejects_oversized_antibodies() {
        let universe = AntigenUniverse::from_antigens(vec![ag("123")]);
        let libraries = GeneLibrary::init(3, 2, 3, 2, &[1, 2, 3], 0.0).unwrap();
        let err = evolve_antibodies(
            &libraries,
            &universe,
            &small_config(0),
            CrossoverOp::TwoPoint,
            1,
        )
        .unwrap_err();
        assert_eq!(
            err,
            AisError::AntibodyTooLong {
                antibody: 4,
                antigen: 3
            }
        );
    }

    #[test]
    fn evolution_keeps_antibodies_below_antigen_length() {
        let universe = AntigenUniverse::from_antigens(vec![ag("984567132"), ag("123456789")]);
        let libraries =
            GeneLibrary::init(8, 2, 4, 2, &(1..=9).collect::<Vec<_>>(), 0.2).unwrap();
        let mut config = small_config(13);
        config.generations = 25;
        let (population, _) = evolve_antibodies(
            &libraries,
            &universe,
            &config,
            CrossoverOp::Overlap,
            2,
        )
        .unwrap();
        for antibody in &population.antibodies {
            assert!(antibody.len() < 9);
        }
    }

    #[test]
    fn population_dump_round_trips() {
        let mut population = AntibodyPopulation::new(vec![ab("9,8,4"), ab("5,*,7")]);
        population.fitness = vec![15, 11];
        let text = population.to_text();
        let back = AntibodyPopulation::from_text(&text).unwrap();
        assert_eq!(population, back);
    }
}
