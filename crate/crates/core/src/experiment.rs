//! Multi-seed comparisons and the model-switch ablation grid.
//!
//! Runs are independent and execute in parallel; records are always
//! returned sorted by configuration label and seed, so output does not
//! depend on the thread count.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::constraints::check_schedule_with;
use crate::domain::Instance;
use crate::error::{Error, Result};
use crate::objective::ObjectiveValue;
use crate::scenario::{AltitudeMode, ScenarioState};
use crate::solver::{solve, Algorithm, ModelOptions, SolverConfig};

/// Parses `a..b` (inclusive) or a comma-separated list.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let bad = || Error::Config(format!("seeds must look like `1..20` or `1,2,3`, got `{text}`"));
    if let Some((a, b)) = text.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub label: String,
    pub seed: u64,
    pub objective: ObjectiveValue,
    pub evaluations: u64,
    pub co_iterations: usize,
    /// Violations of the schedule under the full model (both switches on).
    pub full_model_violations: usize,
}

/// One configuration to run over every seed.
#[derive(Debug, Clone)]
pub struct Job {
    pub label: String,
    pub config: SolverConfig,
}

fn run_one(instance: &Instance, scenario: &ScenarioState, job: &Job, seed: u64) -> Result<RunRecord> {
    let config = SolverConfig {
        rng_seed: seed,
        ..job.config.clone()
    };
    let r = solve(instance, scenario, &config)?;
    let full = ModelOptions::default();
    let full_model_violations = check_schedule_with(&full.prepare(instance), &r.schedule, &full.check_options())?.len();
    Ok(RunRecord {
        label: job.label.clone(),
        seed,
        objective: r.objective,
        evaluations: r.evaluations,
        co_iterations: r.convergence.len(),
        full_model_violations,
    })
}

/// Runs every job for every seed on a pool of `threads` workers (0 means
/// rayon's default).
pub fn run_jobs(instance: &Instance, scenario: &ScenarioState, jobs: &[Job], seeds: &[u64], threads: usize) -> Result<Vec<RunRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let tasks: Vec<(&Job, u64)> = jobs.iter().flat_map(|j| seeds.iter().map(move |&s| (j, s))).collect();
    let mut records: Vec<RunRecord> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(job, seed)| run_one(instance, scenario, job, seed))
            .collect::<Result<_>>()
    })?;
    records.sort_by(|a, b| (&a.label, a.seed).cmp(&(&b.label, b.seed)));
    Ok(records)
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub label: String,
    pub runs: usize,
    pub best_upper: f64,
    pub median_upper: f64,
    pub best_lower: f64,
    pub median_lower: f64,
    pub median_arr_delay_s: f64,
    pub median_dep_delay_s: f64,
    pub median_rot_span_s: f64,
    pub median_full_model_violations: f64,
}

/// Per-label summary in label order. "Best" is the minimum over seeds.
pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut labels: Vec<&str> = records.iter().map(|r| r.label.as_str()).collect();
    labels.dedup();
    labels
        .into_iter()
        .map(|label| {
            let rs: Vec<&RunRecord> = records.iter().filter(|r| r.label == label).collect();
            let col = |f: &dyn Fn(&RunRecord) -> f64| rs.iter().map(|r| f(r)).collect::<Vec<f64>>();
            let min = |v: Vec<f64>| v.into_iter().fold(f64::INFINITY, f64::min);
            SummaryRow {
                label: label.to_string(),
                runs: rs.len(),
                best_upper: min(col(&|r| r.objective.upper)),
                median_upper: median(&col(&|r| r.objective.upper)),
                best_lower: min(col(&|r| r.objective.lower)),
                median_lower: median(&col(&|r| r.objective.lower)),
                median_arr_delay_s: median(&col(&|r| r.objective.components.arr_delay_total_s as f64)),
                median_dep_delay_s: median(&col(&|r| r.objective.components.dep_delay_total_s as f64)),
                median_rot_span_s: median(&col(&|r| r.objective.components.dep_rot_span_s as f64)),
                median_full_model_violations: median(&col(&|r| r.full_model_violations as f64)),
            }
        })
        .collect()
}

const HEADERS: [&str; 10] = [
    "config",
    "runs",
    "best_upper",
    "median_upper",
    "best_lower",
    "median_lower",
    "median_arr_delay_s",
    "median_dep_delay_s",
    "median_rot_span_s",
    "median_full_model_violations",
];

fn cells(r: &SummaryRow) -> Vec<String> {
    let mut v = vec![r.label.clone(), r.runs.to_string()];
    v.extend(
        [
            r.best_upper,
            r.median_upper,
            r.best_lower,
            r.median_lower,
            r.median_arr_delay_s,
            r.median_dep_delay_s,
            r.median_rot_span_s,
            r.median_full_model_violations,
        ]
        .iter()
        .map(|x| format!("{x}")),
    );
    v
}

/// Aligned text table, one row per configuration.
pub fn render_table(rows: &[SummaryRow]) -> String {
    let body: Vec<Vec<String>> = rows.iter().map(cells).collect();
    let widths: Vec<usize> = (0..HEADERS.len())
        .map(|c| body.iter().map(|r| r[c].len()).chain([HEADERS[c].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let line = |out: &mut String, row: &[String]| {
        for (c, cell) in row.iter().enumerate() {
            if c == 0 {
                let _ = write!(out, "{cell:<w$}", w = widths[c]);
            } else {
                let _ = write!(out, "  {cell:>w$}", w = widths[c]);
            }
        }
        out.push('\n');
    };
    line(&mut out, &HEADERS.map(String::from));
    for r in &body {
        line(&mut out, r);
    }
    out
}

pub fn write_summary_csv(rows: &[SummaryRow], out: &mut dyn Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADERS)?;
    for r in rows {
        w.write_record(cells(r))?;
    }
    w.flush()?;
    Ok(())
}

/// One job per algorithm, labelled by algorithm name.
pub fn comparison_jobs(algorithms: &[Algorithm], base: &SolverConfig) -> Vec<Job> {
    algorithms
        .iter()
        .map(|&a| Job {
            label: a.name().to_string(),
            config: SolverConfig {
                algorithm: a,
                ..base.clone()
            },
        })
        .collect()
}

/// The four-way grid of the two model switches, full model first.
pub fn ablation_jobs(base: &SolverConfig) -> Vec<Job> {
    [
        ("full", true, AltitudeMode::Staggered),
        ("no-crsspf", false, AltitudeMode::Staggered),
        ("no-saha", true, AltitudeMode::FixedByAirport),
        ("no-crsspf-no-saha", false, AltitudeMode::FixedByAirport),
    ]
    .into_iter()
    .map(|(label, crsspf, mode)| Job {
        label: label.to_string(),
        config: SolverConfig {
            enable_crsspf: crsspf,
            saha_mode: mode,
            ..base.clone()
        },
    })
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_syntax() {
        assert_eq!(parse_seeds("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_seeds("7, 3,9").unwrap(), vec![7, 3, 9]);
        assert!(parse_seeds("4..1").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }

    #[test]
    fn table_is_aligned() {
        let row = SummaryRow {
            label: "bi-ega".into(),
            runs: 3,
            best_upper: 0.0,
            median_upper: 1.5,
            best_lower: 10.0,
            median_lower: 12.0,
            median_arr_delay_s: -30.0,
            median_dep_delay_s: 60.0,
            median_rot_span_s: 400.0,
            median_full_model_violations: 0.0,
        };
        let t = render_table(&[row.clone(), SummaryRow { label: "fcfs".into(), ..row }]);
        let lens: Vec<usize> = t.lines().map(str::len).collect();
        assert!(lens.windows(2).all(|w| w[0] == w[1]), "{t}");
    }
}
