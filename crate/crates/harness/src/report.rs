//! Report emission. Reports are byte-reproducible for a fixed seed:
//! wall-clock columns stay empty unless timings are explicitly requested.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use aisched_core::matching::Antigen;

use crate::experiment::ExperimentReport;
use crate::HarnessError;

pub const CSV_HEADER: &str =
    "seed,scenario_id,method,makespan,system_fitness_final,robustness_mean,generations,wall_time_ms";

/// Renders the per-row CSV. With `timings` off the wall-time column is
/// left empty so repeated runs compare byte for byte.
pub fn report_csv(report: &ExperimentReport, timings: bool) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &report.rows {
        let fitness = row
            .system_fitness_final
            .map(|f| f.to_string())
            .unwrap_or_default();
        let wall = if timings {
            row.wall_time_ms.map(|w| w.to_string()).unwrap_or_default()
        } else {
            String::new()
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            row.seed,
            row.scenario_id,
            row.method.as_str(),
            row.makespan,
            fitness,
            row.robustness_mean,
            row.generations,
            wall
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// Structured JSON report: the row grid plus the full per-seed detail
/// (pair similarities, makespans, system-fitness traces).
pub fn report_json(report: &ExperimentReport, timings: bool) -> String {
    let mut value = serde_json::to_value(report).expect("report serialization cannot fail");
    if !timings {
        if let Some(rows) = value.get_mut("rows").and_then(|r| r.as_array_mut()) {
            for row in rows {
                if let Some(obj) = row.as_object_mut() {
                    obj.insert("wall_time_ms".into(), serde_json::Value::Null);
                }
            }
        }
    }
    let mut text = serde_json::to_string_pretty(&value).expect("valid JSON");
    text.push('\n');
    text
}

/// Writes `report.csv` and `report.json` under `out_dir`, creating it if
/// needed. Content is fully built before anything is created on disk.
pub fn write_reports(
    report: &ExperimentReport,
    out_dir: &Path,
    timings: bool,
) -> Result<(PathBuf, PathBuf), HarnessError> {
    let csv = report_csv(report, timings);
    let json = report_json(report, timings);
    fs::create_dir_all(out_dir).map_err(|source| HarnessError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let csv_path = out_dir.join("report.csv");
    let json_path = out_dir.join("report.json");
    write_file(&csv_path, &csv)?;
    write_file(&json_path, &json)?;
    Ok((csv_path, json_path))
}

pub fn write_file(path: &Path, content: &str) -> Result<(), HarnessError> {
    fs::write(path, content).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Antigen listing in CSV form: sequence ids are space-separated to keep
/// the column free of quoting.
pub fn antigens_csv(antigens: &[Antigen]) -> String {
    let mut out = String::from("scenario_id,machine,sequence\n");
    for antigen in antigens {
        let seq: Vec<String> = antigen.sequence().iter().map(|id| id.to_string()).collect();
        writeln!(
            out,
            "{},{},{}",
            antigen.scenario_id,
            antigen.machine,
            seq.join(" ")
        )
        .expect("writing to a String cannot fail");
    }
    out
}

pub fn antigens_json(antigens: &[Antigen]) -> String {
    #[derive(serde::Serialize)]
    struct Row<'a> {
        scenario_id: usize,
        machine: usize,
        sequence: &'a [aisched_core::instance::JobId],
    }
    let rows: Vec<Row> = antigens
        .iter()
        .map(|a| Row {
            scenario_id: a.scenario_id,
            machine: a.machine,
            sequence: a.sequence(),
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&rows).expect("valid JSON");
    text.push('\n');
    text
}

/// System-fitness trace CSV for antibody evolution.
pub fn system_fitness_csv(trace: &[f64]) -> String {
    let mut out = String::from("generation,system_fitness\n");
    for (generation, fitness) in trace.iter().enumerate() {
        writeln!(out, "{generation},{fitness}").expect("writing to a String cannot fail");
    }
    out
}
