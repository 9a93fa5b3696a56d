//! End-to-end CLI checks through the real binary: the gen -> universe ->
//! evolve -> schedule -> reschedule pipeline, plus byte-level
//! reproducibility of every file a command writes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_aisched"))
}

fn run(args: &[&str]) -> Output {
    let output = bin().args(args).output().expect("binary runs");
    assert!(
        output.status.success(),
        "command {:?} failed:\n{}",
        args,
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn pipeline_from_gen_to_reschedule() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let instance = root.join("shop.txt");
    let scenarios = root.join("scenarios.json");

    run(&[
        "gen",
        "--seed",
        "42",
        "--jobs",
        "8",
        "--machines",
        "4",
        "--out",
        instance.to_str().unwrap(),
        "--scenario-count",
        "4",
        "--scenarios-out",
        scenarios.to_str().unwrap(),
    ]);
    assert!(read(&instance).starts_with("8 4"));

    let universe = run(&[
        "universe",
        "--instance",
        instance.to_str().unwrap(),
        "--scenarios",
        scenarios.to_str().unwrap(),
        "--seed",
        "1",
        "--generations",
        "10",
        "--pop-size",
        "12",
    ]);
    let universe_csv = String::from_utf8(universe.stdout).unwrap();
    assert!(universe_csv.starts_with("scenario_id,machine,sequence"));
    // 4 scenarios x 4 machines plus the header.
    assert_eq!(universe_csv.lines().count(), 17);

    let evolve_dir = root.join("evolved");
    run(&[
        "evolve",
        "--instance",
        instance.to_str().unwrap(),
        "--scenarios",
        scenarios.to_str().unwrap(),
        "--seed",
        "1",
        "--generations",
        "10",
        "--pop-size",
        "12",
        "--libraries",
        "2",
        "--component-len",
        "2",
        "--out",
        evolve_dir.to_str().unwrap(),
    ]);
    let population = evolve_dir.join("population.txt");
    assert_eq!(read(&population).lines().count(), 12);
    assert!(read(&evolve_dir.join("system_fitness.csv")).starts_with("generation,system_fitness"));

    let schedule = root.join("schedule.json");
    run(&[
        "schedule",
        "--instance",
        instance.to_str().unwrap(),
        "--population",
        population.to_str().unwrap(),
        "--out",
        schedule.to_str().unwrap(),
    ]);
    let parsed: serde_json::Value = serde_json::from_str(&read(&schedule)).unwrap();
    assert!(parsed["makespan"].as_u64().unwrap() > 0);

    // One concrete change: job 2 arrives 15 time units late.
    let change = root.join("change.json");
    fs::write(&change, r#"{"arrival_shifts": {"2": 15}}"#).unwrap();
    let resched_dir = root.join("rescheduled");
    run(&[
        "reschedule",
        "--instance",
        instance.to_str().unwrap(),
        "--scenarios",
        change.to_str().unwrap(),
        "--population",
        population.to_str().unwrap(),
        "--schedule",
        schedule.to_str().unwrap(),
        "--seed",
        "1",
        "--generations",
        "10",
        "--pop-size",
        "12",
        "--libraries",
        "2",
        "--component-len",
        "2",
        "--out",
        resched_dir.to_str().unwrap(),
    ]);
    assert!(resched_dir.join("schedule.json").exists());
    assert!(resched_dir.join("warm_trace.csv").exists());
    assert!(resched_dir.join("cold_trace.csv").exists());
}

#[test]
fn repeated_commands_write_byte_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();

    for name in ["a.txt", "b.txt"] {
        run(&[
            "gen",
            "--seed",
            "5",
            "--jobs",
            "6",
            "--machines",
            "3",
            "--out",
            root.join(name).to_str().unwrap(),
        ]);
    }
    assert_eq!(read(&root.join("a.txt")), read(&root.join("b.txt")));

    for out in ["run1", "run2"] {
        run(&[
            "experiment",
            "--gen-jobs",
            "6",
            "--gen-machines",
            "3",
            "--scenario-count",
            "3",
            "--seeds",
            "1,2",
            "--pop-size",
            "12",
            "--generations",
            "10",
            "--libraries",
            "2",
            "--component-len",
            "2",
            "--out",
            root.join(out).to_str().unwrap(),
        ]);
    }
    assert_eq!(
        read(&root.join("run1/report.csv")),
        read(&root.join("run2/report.csv"))
    );
    assert_eq!(
        read(&root.join("run1/report.json")),
        read(&root.join("run2/report.json"))
    );
    let csv = read(&root.join("run1/report.csv"));
    assert!(csv.starts_with(
        "seed,scenario_id,method,makespan,system_fitness_final,robustness_mean,generations,wall_time_ms"
    ));
    // 2 seeds x 3 scenarios x 2 methods plus the header.
    assert_eq!(csv.lines().count(), 13);
}

#[test]
fn missing_instance_leaves_no_partial_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let output = bin()
        .args([
            "experiment",
            "--instance",
            "/definitely/not/here.txt",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(!out.exists(), "failed run must not create output files");
}
