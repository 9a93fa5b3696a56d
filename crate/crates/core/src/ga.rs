//! Seeded generational genetic algorithm with tournament selection,
//! elitism, and the three crossover operators used throughout: order-based,
//! two-point, and overlap.
//!
//! Order-based and two-point crossover operate on permutation genomes;
//! two-point and overlap also come in antibody flavors that keep the
//! distinct-job invariant by degrading later duplicates to wildcards.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::JobId;
use crate::library::dedup_to_wildcards;
use crate::matching::{Antibody, Symbol};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GaError {
    #[error("parents must share length and token multiset")]
    MismatchedParents,
    #[error("initial population is empty")]
    EmptyPopulation,
    #[error("invalid GA configuration: {0}")]
    InvalidConfig(String),
}

/// Which crossover a run uses. Order-based applies to permutation
/// genomes, overlap to antibody genomes; two-point applies to both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossoverOp {
    OrderBased,
    TwoPoint,
    Overlap,
}

impl CrossoverOp {
    /// Operator actually used on machine-sequence permutations; overlap
    /// does not preserve permutations, so it falls back to order-based.
    pub fn for_permutations(self) -> CrossoverOp {
        match self {
            CrossoverOp::Overlap => CrossoverOp::OrderBased,
            other => other,
        }
    }

    /// Operator actually used on antibody genomes; order-based needs a
    /// shared token multiset, so it falls back to two-point.
    pub fn for_antibodies(self) -> CrossoverOp {
        match self {
            CrossoverOp::OrderBased => CrossoverOp::TwoPoint,
            other => other,
        }
    }
}

impl fmt::Display for CrossoverOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CrossoverOp::OrderBased => "obx",
            CrossoverOp::TwoPoint => "2pt",
            CrossoverOp::Overlap => "overlap",
        };
        write!(f, "{name}")
    }
}

impl FromStr for CrossoverOp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "obx" => Ok(CrossoverOp::OrderBased),
            "2pt" => Ok(CrossoverOp::TwoPoint),
            "overlap" => Ok(CrossoverOp::Overlap),
            other => Err(format!("unknown crossover `{other}` (use obx|2pt|overlap)")),
        }
    }
}

/// Run parameters for the generational GA.
#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub tournament_size: usize,
    pub elitism_count: usize,
    pub seed: u64,
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), GaError> {
        if self.population_size < 2 {
            return Err(GaError::InvalidConfig("population_size must be >= 2".into()));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) || !(0.0..=1.0).contains(&self.mutation_rate)
        {
            return Err(GaError::InvalidConfig("rates must lie in [0, 1]".into()));
        }
        if self.tournament_size == 0 {
            return Err(GaError::InvalidConfig("tournament_size must be >= 1".into()));
        }
        if self.elitism_count >= self.population_size {
            return Err(GaError::InvalidConfig(
                "elitism_count must be below population_size".into(),
            ));
        }
        Ok(())
    }

    /// Same parameters, different seed.
    pub fn with_seed(&self, seed: u64) -> GaConfig {
        GaConfig { seed, ..self.clone() }
    }
}

/// One generation's fitness summary; best is the maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
    pub worst: f64,
}

/// Result of a GA run: the best genome ever seen, the final population,
/// and per-generation statistics (one row per evaluated generation,
/// including the initial one).
#[derive(Debug, Clone)]
pub struct GaOutcome<G> {
    pub best: G,
    pub best_fitness: f64,
    pub population: Vec<G>,
    pub trace: Vec<GenerationStats>,
}

fn population_stats(generation: usize, fitness: &[f64]) -> GenerationStats {
    let best = fitness.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let worst = fitness.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = fitness.iter().sum::<f64>() / fitness.len() as f64;
    GenerationStats {
        generation,
        best,
        mean,
        worst,
    }
}

/// Tournament winner: best fitness among `size` uniform draws, ties to
/// the earlier draw.
pub fn tournament_select(fitness: &[f64], size: usize, rng: &mut ChaCha8Rng) -> usize {
    debug_assert!(!fitness.is_empty() && size >= 1);
    let mut winner = rng.random_range(0..fitness.len());
    for _ in 1..size {
        let challenger = rng.random_range(0..fitness.len());
        if fitness[challenger] > fitness[winner] {
            winner = challenger;
        }
    }
    winner
}

/// Indices of the `count` fittest individuals, fitness descending, ties
/// to the lower index.
pub fn elite_indices(fitness: &[f64], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitness.len()).collect();
    order.sort_by(|&a, &b| {
        fitness[b]
            .partial_cmp(&fitness[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order.truncate(count);
    order
}

/// Runs a generational GA: tournament selection, the supplied crossover
/// with probability `crossover_rate`, the supplied mutation with
/// probability `mutation_rate` per offspring, and `elitism_count` best
/// individuals carried over unchanged. Deterministic for a fixed seed.
pub fn run_ga<G: Clone>(
    config: &GaConfig,
    initial: Vec<G>,
    mut fitness: impl FnMut(&G) -> f64,
    mut crossover: impl FnMut(&G, &G, &mut ChaCha8Rng) -> G,
    mut mutate: impl FnMut(&mut G, &mut ChaCha8Rng),
) -> Result<GaOutcome<G>, GaError> {
    config.validate()?;
    if initial.is_empty() {
        return Err(GaError::EmptyPopulation);
    }
    if initial.len() != config.population_size {
        return Err(GaError::InvalidConfig(format!(
            "initial population holds {} genomes, config says {}",
            initial.len(),
            config.population_size
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut population = initial;
    let mut scores: Vec<f64> = population.iter().map(&mut fitness).collect();
    let mut trace = vec![population_stats(0, &scores)];
    let mut best_idx = elite_indices(&scores, 1)[0];
    let mut best = population[best_idx].clone();
    let mut best_fitness = scores[best_idx];

    for generation in 1..=config.generations {
        let mut next = Vec::with_capacity(config.population_size);
        for &idx in &elite_indices(&scores, config.elitism_count) {
            next.push(population[idx].clone());
        }
        while next.len() < config.population_size {
            let p1 = tournament_select(&scores, config.tournament_size, &mut rng);
            let p2 = tournament_select(&scores, config.tournament_size, &mut rng);
            let mut child = if rng.random_bool(config.crossover_rate) {
                crossover(&population[p1], &population[p2], &mut rng)
            } else {
                population[p1].clone()
            };
            if rng.random_bool(config.mutation_rate) {
                mutate(&mut child, &mut rng);
            }
            next.push(child);
        }
        population = next;
        scores = population.iter().map(&mut fitness).collect();
        trace.push(population_stats(generation, &scores));
        best_idx = elite_indices(&scores, 1)[0];
        if scores[best_idx] > best_fitness {
            best = population[best_idx].clone();
            best_fitness = scores[best_idx];
        }
    }

    Ok(GaOutcome {
        best,
        best_fitness,
        population,
        trace,
    })
}

fn check_permutation_parents(p1: &[JobId], p2: &[JobId]) -> Result<(), GaError> {
    if p1.len() != p2.len() {
        return Err(GaError::MismatchedParents);
    }
    let mut a = p1.to_vec();
    let mut b = p2.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return Err(GaError::MismatchedParents);
    }
    Ok(())
}

/// Order-based crossover: a random position subset of `p1` has its tokens
/// rewritten in the relative order those tokens take in `p2`; everything
/// else stays put.
pub fn order_based_crossover(
    p1: &[JobId],
    p2: &[JobId],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<JobId>, GaError> {
    check_permutation_parents(p1, p2)?;
    let selected: Vec<usize> = (0..p1.len()).filter(|_| rng.random_bool(0.5)).collect();
    Ok(order_based_rewrite(p1, p2, &selected))
}

/// Deterministic core of order-based crossover for a chosen subset.
pub(crate) fn order_based_rewrite(p1: &[JobId], p2: &[JobId], selected: &[usize]) -> Vec<JobId> {
    let chosen: Vec<JobId> = selected.iter().map(|&i| p1[i]).collect();
    let mut reordered: Vec<JobId> = p2.iter().copied().filter(|t| chosen.contains(t)).collect();
    let mut child = p1.to_vec();
    for &i in selected {
        child[i] = reordered.remove(0);
    }
    child
}

/// Two-point crossover on permutations: the segment `[a, b)` comes from
/// `p2`, the rest from `p1`; duplicates outside the segment are replaced
/// left to right by the missing tokens in `p1`'s order.
pub fn two_point_crossover(
    p1: &[JobId],
    p2: &[JobId],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<JobId>, GaError> {
    check_permutation_parents(p1, p2)?;
    let (a, b) = random_cuts(p1.len(), rng);
    Ok(two_point_splice_permutation(p1, p2, a, b))
}

pub(crate) fn two_point_splice_permutation(
    p1: &[JobId],
    p2: &[JobId],
    a: usize,
    b: usize,
) -> Vec<JobId> {
    let n = p1.len();
    let mut child: Vec<JobId> = (0..n)
        .map(|i| if i >= a && i < b { p2[i] } else { p1[i] })
        .collect();
    let segment: Vec<JobId> = child[a..b].to_vec();
    let mut missing: Vec<JobId> = p1
        .iter()
        .copied()
        .filter(|t| !child.contains(t))
        .collect();
    // Walk outside positions left to right, replacing any token that
    // duplicates the segment.
    for i in (0..a).chain(b..n) {
        if segment.contains(&child[i]) {
            child[i] = missing.remove(0);
        }
    }
    child
}

fn random_cuts(n: usize, rng: &mut ChaCha8Rng) -> (usize, usize) {
    let a = rng.random_range(0..=n);
    let b = rng.random_range(0..=n);
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Two-point crossover on antibody genomes of equal length; later
/// duplicate job ids degrade to wildcards.
pub fn two_point_crossover_antibodies(
    p1: &Antibody,
    p2: &Antibody,
    rng: &mut ChaCha8Rng,
) -> Result<Antibody, GaError> {
    if p1.len() != p2.len() {
        return Err(GaError::MismatchedParents);
    }
    let (a, b) = random_cuts(p1.len(), rng);
    let spliced: Vec<Symbol> = (0..p1.len())
        .map(|i| {
            if i >= a && i < b {
                p2.symbols()[i]
            } else {
                p1.symbols()[i]
            }
        })
        .collect();
    Ok(Antibody::new(dedup_to_wildcards(spliced))
        .expect("splice of valid antibodies stays non-empty"))
}

/// Overlap crossover: split at the longest common contiguous symbol run
/// (ties to the earliest occurrence in `p1`, then in `p2`) and join `p1`'s
/// prefix through the run with `p2`'s suffix after it. Without any common
/// run the child is `p1`. Duplicates after the splice become wildcards.
pub fn overlap_crossover(p1: &Antibody, p2: &Antibody) -> Antibody {
    match longest_common_run(p1.symbols(), p2.symbols()) {
        None => p1.clone(),
        Some((start1, start2, len)) => {
            let mut symbols: Vec<Symbol> = p1.symbols()[..start1 + len].to_vec();
            symbols.extend_from_slice(&p2.symbols()[start2 + len..]);
            Antibody::new(dedup_to_wildcards(symbols))
                .expect("splice keeps at least the common run")
        }
    }
}

/// Longest common contiguous run of two symbol slices, as
/// `(start_in_a, start_in_b, length)`. Ties prefer the earliest start in
/// `a`, then the earliest in `b`.
fn longest_common_run(a: &[Symbol], b: &[Symbol]) -> Option<(usize, usize, usize)> {
    let mut best: Option<(usize, usize, usize)> = None;
    for i in 0..a.len() {
        for j in 0..b.len() {
            let mut len = 0;
            while i + len < a.len() && j + len < b.len() && a[i + len] == b[j + len] {
                len += 1;
            }
            if len == 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, bj, blen)) => len > blen || (len == blen && (i, j) < (bi, bj)),
            };
            if better {
                best = Some((i, j, len));
            }
        }
    }
    best
}

/// Swap mutation: exchange two uniformly chosen positions.
pub fn swap_mutation<T>(genome: &mut [T], rng: &mut ChaCha8Rng) {
    if genome.len() < 2 {
        return;
    }
    let i = rng.random_range(0..genome.len());
    let j = rng.random_range(0..genome.len());
    genome.swap(i, j);
}
