use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use aisched::{
    generate_scenarios, report, reschedule, run_experiment, AisParams, ExperimentConfig,
    InstanceSource, LibraryShape, ScenarioSource,
};
use aisched_core::ais::{
    build_antigen_universe, build_schedule, evolve_antibodies, AntibodyPopulation,
};
use aisched_core::ga::{CrossoverOp, GaConfig};
use aisched_core::instance::{generate_instance, parse_instance, Instance, Time};
use aisched_core::library::GeneLibrary;
use aisched_core::scenario::{apply_scenario, parse_scenarios, scenarios_to_json, Scenario};
use aisched_core::schedule::Schedule;
use aisched_core::seeding::derive_seed;

/// Immune-inspired job-shop scheduling toolkit.
#[derive(Parser)]
#[command(name = "aisched", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct GaArgs {
    /// Population size for every GA run.
    #[arg(long, default_value_t = 30)]
    pop_size: usize,
    /// Generations per GA run.
    #[arg(long, default_value_t = 40)]
    generations: usize,
    #[arg(long, default_value_t = 0.9)]
    crossover_rate: f64,
    #[arg(long, default_value_t = 0.3)]
    mutation_rate: f64,
    #[arg(long, default_value_t = 3)]
    tournament: usize,
    #[arg(long, default_value_t = 2)]
    elitism: usize,
    /// Crossover operator: obx | 2pt | overlap.
    #[arg(long, default_value = "2pt")]
    crossover: CrossoverOp,
}

impl GaArgs {
    fn config(&self, seed: u64) -> GaConfig {
        GaConfig {
            population_size: self.pop_size,
            generations: self.generations,
            crossover_rate: self.crossover_rate,
            mutation_rate: self.mutation_rate,
            tournament_size: self.tournament,
            elitism_count: self.elitism,
            seed,
        }
    }
}

#[derive(Args)]
struct LibraryArgs {
    /// Number of gene libraries (l).
    #[arg(long, default_value_t = 3)]
    libraries: usize,
    /// Components per library (c).
    #[arg(long, default_value_t = 4)]
    components: usize,
    /// Symbols per component.
    #[arg(long, default_value_t = 2)]
    component_len: usize,
    /// Probability of a wildcard symbol at initialization.
    #[arg(long, default_value_t = 0.1)]
    wildcard_rate: f64,
}

impl LibraryArgs {
    fn shape(&self) -> LibraryShape {
        LibraryShape {
            libraries: self.libraries,
            components: self.components,
            component_length: self.component_len,
            wildcard_rate: self.wildcard_rate,
        }
    }
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario suite file (JSON object or array).
    #[arg(long)]
    scenarios: Option<PathBuf>,
    /// Generate this many scenarios when no file is given.
    #[arg(long, default_value_t = 10)]
    scenario_count: usize,
    /// Seed for generated scenario suites.
    #[arg(long, default_value_t = 11)]
    scenario_seed: u64,
}

impl ScenarioArgs {
    fn source(&self) -> ScenarioSource {
        match &self.scenarios {
            Some(path) => ScenarioSource::File(path.clone()),
            None => ScenarioSource::Generated {
                seed: self.scenario_seed,
                count: self.scenario_count,
            },
        }
    }

    fn load(&self, instance: &Instance) -> Result<Vec<Scenario>> {
        Ok(self.source().load(instance)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance (and optionally a scenario suite).
    Gen {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        jobs: usize,
        #[arg(long, default_value_t = 5)]
        machines: usize,
        #[arg(long, default_value_t = 1)]
        duration_lo: Time,
        #[arg(long, default_value_t = 99)]
        duration_hi: Time,
        /// Instance output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also generate a scenario suite of this size.
        #[arg(long)]
        scenario_count: Option<usize>,
        #[arg(long, default_value_t = 11)]
        scenario_seed: u64,
        /// Scenario suite output path.
        #[arg(long)]
        scenarios_out: Option<PathBuf>,
    },
    /// Build the antigen universe for an instance and scenario suite.
    Universe {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        scenarios: ScenarioArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        ga: GaArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Also write the per-scenario GA fitness traces to this CSV.
        #[arg(long)]
        ga_trace: Option<PathBuf>,
    },
    /// Evolve an antibody population against the antigen universe.
    Evolve {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        scenarios: ScenarioArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        ga: GaArgs,
        #[command(flatten)]
        library: LibraryArgs,
        /// Antigens sampled per generation (default: half the universe).
        #[arg(long)]
        sample_size: Option<usize>,
        /// Output directory for population.txt and system_fitness.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recombine an antibody population into a complete schedule.
    Schedule {
        #[arg(long)]
        instance: PathBuf,
        /// Antibody population dump (from `evolve`).
        #[arg(long)]
        population: PathBuf,
        /// Optional scenario suite to perturb the instance first.
        #[arg(long)]
        scenarios: Option<PathBuf>,
        /// Which scenario of the suite to schedule for.
        #[arg(long, default_value_t = 0)]
        scenario_index: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run the full AIS-versus-GA experiment grid.
    Experiment {
        /// Instance file; omit to generate one.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long, default_value_t = 7)]
        gen_seed: u64,
        #[arg(long, default_value_t = 10)]
        gen_jobs: usize,
        #[arg(long, default_value_t = 5)]
        gen_machines: usize,
        #[arg(long, default_value_t = 1)]
        gen_duration_lo: Time,
        #[arg(long, default_value_t = 99)]
        gen_duration_hi: Time,
        #[command(flatten)]
        scenarios: ScenarioArgs,
        /// Run seed (used when --seeds is omitted).
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Comma-separated list of run seeds.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        #[command(flatten)]
        ga: GaArgs,
        #[command(flatten)]
        library: LibraryArgs,
        #[arg(long)]
        sample_size: Option<usize>,
        /// Output directory for report.csv and report.json.
        #[arg(long)]
        out: PathBuf,
        /// Record wall-clock times (makes reports non-reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Reschedule after an environment change, reusing the previous
    /// antibody population.
    Reschedule {
        #[arg(long)]
        instance: PathBuf,
        /// Scenario describing the change (single object or 1-element list).
        #[arg(long)]
        scenarios: PathBuf,
        /// Previous antibody population dump.
        #[arg(long)]
        population: PathBuf,
        /// Previous schedule (JSON, as written by `schedule`).
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        ga: GaArgs,
        #[command(flatten)]
        library: LibraryArgs,
        #[arg(long)]
        sample_size: Option<usize>,
        /// Output directory for the new schedule, population and traces.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Schedule file wrapper so the makespan is visible next to the data.
#[derive(Serialize, Deserialize)]
struct ScheduleFile {
    makespan: Time,
    schedule: Schedule,
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(out: Option<&PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)
                    .with_context(|| format!("cannot create {}", parent.display()))?;
            }
            fs::write(path, content).with_context(|| format!("cannot write {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn schedule_csv(schedule: &Schedule) -> String {
    let mut out = String::from("machine,position,job,start,duration\n");
    for (m, seq) in schedule.machine_sequences.iter().enumerate() {
        for (position, job) in seq.iter().enumerate() {
            let op = schedule
                .ops
                .iter()
                .find(|op| op.machine == m && op.job == *job)
                .expect("every sequenced job has an operation");
            out.push_str(&format!(
                "{m},{position},{job},{},{}\n",
                op.start, op.duration
            ));
        }
    }
    out
}

fn schedule_json(schedule: &Schedule) -> String {
    let mut text = serde_json::to_string_pretty(&ScheduleFile {
        makespan: schedule.makespan(),
        schedule: schedule.clone(),
    })
    .expect("schedule serialization cannot fail");
    text.push('\n');
    text
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen {
            seed,
            jobs,
            machines,
            duration_lo,
            duration_hi,
            out,
            scenario_count,
            scenario_seed,
            scenarios_out,
        } => {
            let instance = generate_instance(seed, jobs, machines, (duration_lo, duration_hi))?;
            emit(out.as_ref(), &instance.to_text())?;
            if let Some(count) = scenario_count {
                let suite = generate_scenarios(&instance, count, scenario_seed);
                let mut text = scenarios_to_json(&suite);
                text.push('\n');
                emit(scenarios_out.as_ref(), &text)?;
            }
            Ok(())
        }

        Command::Universe {
            instance,
            scenarios,
            seed,
            ga,
            out,
            format,
            ga_trace,
        } => {
            let instance = parse_instance(&read_to_string(&instance)?)?;
            let suite = scenarios.load(&instance)?;
            let config = ga.config(derive_seed(seed, 1));
            let universe = build_antigen_universe(&instance, &suite, &config, ga.crossover)?;
            if let Some(path) = ga_trace {
                // Replay each scenario's GA with the seeds the universe
                // build derives, collecting the fitness traces.
                let mut csv = String::from("scenario_id,generation,best,mean,worst\n");
                for (scenario_id, scenario) in suite.iter().enumerate() {
                    let perturbed = apply_scenario(&instance, scenario)?;
                    let per_scenario =
                        config.with_seed(derive_seed(config.seed, scenario_id as u64));
                    let (_, trace) =
                        aisched_core::ais::evolve_schedule(&perturbed, &per_scenario, ga.crossover)?;
                    for row in trace {
                        csv.push_str(&format!(
                            "{scenario_id},{},{},{},{}\n",
                            row.generation, row.best, row.mean, row.worst
                        ));
                    }
                }
                emit(Some(&path), &csv)?;
            }
            let content = match format {
                Format::Csv => report::antigens_csv(&universe.antigens),
                Format::Json => report::antigens_json(&universe.antigens),
            };
            emit(out.as_ref(), &content)
        }

        Command::Evolve {
            instance,
            scenarios,
            seed,
            ga,
            library,
            sample_size,
            out,
        } => {
            let instance = parse_instance(&read_to_string(&instance)?)?;
            let suite = scenarios.load(&instance)?;
            let universe = build_antigen_universe(
                &instance,
                &suite,
                &ga.config(derive_seed(seed, 1)),
                ga.crossover,
            )?;
            let libraries = GeneLibrary::init(
                derive_seed(seed, 2),
                library.libraries,
                library.components,
                library.component_len,
                &instance.job_ids(),
                library.wildcard_rate,
            )?;
            let sample = sample_size
                .unwrap_or(universe.len() / 2)
                .clamp(1, universe.len());
            let (population, trace) = evolve_antibodies(
                &libraries,
                &universe,
                &ga.config(derive_seed(seed, 3)),
                ga.crossover,
                sample,
            )?;
            eprintln!(
                "final system fitness {} after {} generations",
                trace.last().expect("trace is never empty"),
                ga.generations
            );
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir)
                        .with_context(|| format!("cannot create {}", dir.display()))?;
                    emit(Some(&dir.join("population.txt")), &population.to_text())?;
                    emit(
                        Some(&dir.join("system_fitness.csv")),
                        &report::system_fitness_csv(&trace),
                    )?;
                }
                None => print!("{}", population.to_text()),
            }
            Ok(())
        }

        Command::Schedule {
            instance,
            population,
            scenarios,
            scenario_index,
            out,
            format,
        } => {
            let base = parse_instance(&read_to_string(&instance)?)?;
            let target = match scenarios {
                Some(path) => {
                    let suite = parse_scenarios(&read_to_string(&path)?)?;
                    let scenario = suite.get(scenario_index).with_context(|| {
                        format!("suite has {} scenarios, asked for {scenario_index}", suite.len())
                    })?;
                    apply_scenario(&base, scenario)?
                }
                None => base,
            };
            let population = AntibodyPopulation::from_text(&read_to_string(&population)?)?;
            let schedule = build_schedule(&population, &target)?;
            schedule.validate(&target)?;
            eprintln!("makespan {}", schedule.makespan());
            let content = match format {
                Format::Csv => schedule_csv(&schedule),
                Format::Json => schedule_json(&schedule),
            };
            emit(out.as_ref(), &content)
        }

        Command::Experiment {
            instance,
            gen_seed,
            gen_jobs,
            gen_machines,
            gen_duration_lo,
            gen_duration_hi,
            scenarios,
            seed,
            seeds,
            ga,
            library,
            sample_size,
            out,
            timings,
        } => {
            let source = match instance {
                Some(path) => InstanceSource::File(path),
                None => InstanceSource::Generated {
                    seed: gen_seed,
                    jobs: gen_jobs,
                    machines: gen_machines,
                    duration: (gen_duration_lo, gen_duration_hi),
                },
            };
            let seeds = if seeds.is_empty() { vec![seed] } else { seeds };
            let config = ExperimentConfig {
                instance: source,
                scenarios: scenarios.source(),
                params: AisParams {
                    ga: ga.config(0),
                    crossover: ga.crossover,
                    library: library.shape(),
                    sample_size,
                },
                seeds,
            };
            let result = run_experiment(&config)?;
            let (csv_path, json_path) = report::write_reports(&result, &out, timings)?;
            eprintln!("wrote {}", csv_path.display());
            eprintln!("wrote {}", json_path.display());
            eprintln!(
                "ais mean makespan {:.2}, ga mean makespan {:.2}, ais at least as robust on {}/{} seeds",
                result.mean_makespan(aisched::Method::Ais),
                result.mean_makespan(aisched::Method::Ga),
                result.robustness_wins(),
                result.runs.len()
            );
            Ok(())
        }

        Command::Reschedule {
            instance,
            scenarios,
            population,
            schedule,
            seed,
            ga,
            library,
            sample_size,
            out,
        } => {
            let base = parse_instance(&read_to_string(&instance)?)?;
            let suite = parse_scenarios(&read_to_string(&scenarios)?)?;
            if suite.len() != 1 {
                bail!(
                    "reschedule expects exactly one scenario, the file holds {}",
                    suite.len()
                );
            }
            let previous_population = AntibodyPopulation::from_text(&read_to_string(&population)?)?;
            let previous: ScheduleFile = serde_json::from_str(&read_to_string(&schedule)?)
                .with_context(|| format!("cannot parse {}", schedule.display()))?;
            let params = AisParams {
                ga: ga.config(0),
                crossover: ga.crossover,
                library: library.shape(),
                sample_size,
            };
            let outcome = reschedule(
                &previous_population,
                &previous.schedule,
                &base,
                &suite[0],
                &params,
                seed,
            )?;
            eprintln!(
                "previous makespan {}, new makespan {}",
                previous.makespan,
                outcome.schedule.makespan()
            );
            match (
                outcome.warm_generations_to_cold_final,
                outcome.cold_trace.last(),
            ) {
                (Some(g), Some(cold)) => eprintln!(
                    "warm start reached the cold run's final system fitness {cold} at generation {g} \
                     (cold took {} generations)",
                    outcome.cold_trace.len() - 1
                ),
                (None, Some(cold)) => {
                    eprintln!("warm start never reached the cold run's final system fitness {cold}")
                }
                _ => eprintln!("identity scenario: previous schedule kept"),
            }
            if let Some(dir) = out {
                fs::create_dir_all(&dir)
                    .with_context(|| format!("cannot create {}", dir.display()))?;
                emit(Some(&dir.join("schedule.json")), &schedule_json(&outcome.schedule))?;
                emit(
                    Some(&dir.join("population.txt")),
                    &outcome.population.to_text(),
                )?;
                emit(
                    Some(&dir.join("warm_trace.csv")),
                    &report::system_fitness_csv(&outcome.warm_trace),
                )?;
                emit(
                    Some(&dir.join("cold_trace.csv")),
                    &report::system_fitness_csv(&outcome.cold_trace),
                )?;
            } else {
                print!("{}", schedule_json(&outcome.schedule));
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_file_round_trips() {
        let instance = generate_instance(1, 3, 2, (1, 9)).unwrap();
        let sequences: Vec<Vec<_>> = (0..2).map(|m| instance.jobs_on_machine(m)).collect();
        let schedule = aisched_core::schedule::decode(&instance, &sequences).unwrap();
        let text = schedule_json(&schedule);
        let back: ScheduleFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.schedule, schedule);
        assert_eq!(back.makespan, schedule.makespan());
    }

    #[test]
    fn cli_declares_the_contracted_subcommands() {
        use clap::CommandFactory;
        let cmd = Cli::command();
        let names: Vec<&str> = cmd.get_subcommands().map(|c| c.get_name()).collect();
        for expected in ["gen", "universe", "evolve", "schedule", "experiment", "reschedule"] {
            assert!(names.contains(&expected), "missing subcommand {expected}");
        }
    }
}
