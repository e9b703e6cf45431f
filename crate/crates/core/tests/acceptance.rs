//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! cargo test --release -p metroplex --test acceptance

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use metroplex::builder::{FlightSpec, InstanceBuilder, ZSPD};
use metroplex::experiment::{ablation_jobs, comparison_jobs, median, run_jobs, RunRecord};
use metroplex::io::{generate_instance, generate_micro_instance, scenario_counts, shanghai_fixture, write_result, Template};
use metroplex::objective::{ObjectiveContext, ObjectiveOptions};
use metroplex::scenario::{assign_handover_altitudes, classify_scenario, compute_thresholds, AltitudeMode};
use metroplex::solver::{brute_force_oracle, fcfs_schedule, SolveResult};
use metroplex::{solve, AircraftClass, Algorithm, FlightKind, Instance, ScenarioState, SolverConfig};

// Pinned tolerances.
const THRESHOLD_RUNTIME_MS: f64 = 1.0;
const SWEEP_INSTANCES: u64 = 200;
const SWEEP_SEEDS: u64 = 3;
const SWEEP_RUNTIME_S: f64 = 600.0;
const MICRO_INSTANCES: u64 = 60;
const ORACLE_GRID_S: i64 = 30;
const ORACLE_MATCH_MIN: f64 = 0.90;
const DOMINANCE_INSTANCES: u64 = 30;
const DOMINANCE_SEEDS: u64 = 20;
const STRICT_IMPROVEMENT_MIN: f64 = 0.50;
const PERMUTATIONS: usize = 1000;
const ABLATION_INSTANCES: u64 = 10;
const ABLATION_SEEDS: u64 = 20;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn scenario_of(inst: &Instance) -> ScenarioState {
    classify_scenario(inst, &compute_thresholds(inst))
}

fn generated(k: u8, seed: u64) -> Instance {
    generate_instance(Template::Shanghai, &scenario_counts(Template::Shanghai, k).unwrap(), seed).unwrap()
}

fn seeds(n: u64) -> Vec<u64> {
    (1..=n).collect()
}

fn thresholds() -> Outcome {
    let inst = shanghai_fixture();
    let t = compute_thresholds(&inst);
    let got = (t.mas, t.airport("ZSSS"), t.airport("ZSPD"));
    let reps = 1000;
    let start = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(compute_thresholds(std::hint::black_box(&inst)));
    }
    let ms = start.elapsed().as_secs_f64() * 1e3 / reps as f64;
    outcome(
        got == (19, Some(7), Some(12)) && ms < THRESHOLD_RUNTIME_MS,
        format!("MAS {} ZSSS {:?} ZSPD {:?}, {ms:.4} ms per call", got.0, got.1, got.2),
    )
}

fn separation_tables() -> Outcome {
    use AircraftClass::*;
    // Rows follow, columns precede, in minutes.
    let arr = [[1, 2, 3, 4], [1, 1, 2, 3], [1, 1, 1, 3], [1, 1, 1, 1]];
    let dep = [[1, 2, 3, 3], [1, 1, 2, 2], [1, 1, 1, 2], [1, 1, 1, 1]];
    let classes = [A380, Heavy, Medium, Light];
    let inst = shanghai_fixture();
    let cfg = inst.separation();
    let mut bad = Vec::new();
    for (r, &f) in classes.iter().enumerate() {
        for (c, &p) in classes.iter().enumerate() {
            if cfg.wake(f, p, FlightKind::Arrival) != 60 * arr[r][c] {
                bad.push(format!("arr[{f:?}][{p:?}]"));
            }
            if cfg.wake(f, p, FlightKind::Departure) != 60 * dep[r][c] {
                bad.push(format!("dep[{f:?}][{p:?}]"));
            }
        }
    }
    let scalars = [
        ("handover arr", cfg.handover_sep_arr, 90),
        ("handover dep", cfg.handover_sep_dep, 135),
        ("vacate", cfg.vacate_time, 45),
        ("cross", cfg.cross_time, 45),
        ("clear", cfg.dep_clear_time, 45),
    ];
    for (name, got, want) in scalars {
        if got != want {
            bad.push(name.to_string());
        }
    }
    if cfg.crossing_wingspan_threshold_m != 36.0 {
        bad.push("wingspan threshold".into());
    }
    if inst.flights().iter().any(|f| f.max_position_shift != 2) {
        bad.push("max position shift".into());
    }
    outcome(bad.is_empty(), format!("32 wake cells and 7 scalars checked, mismatches: {bad:?}"))
}

struct Sweep {
    runs: usize,
    violations: usize,
    non_monotone: usize,
    bad_slots: usize,
    seconds: f64,
}

fn trace_is_monotone(r: &SolveResult) -> bool {
    r.convergence
        .windows(2)
        .all(|w| w[1].upper_best <= w[0].upper_best && w[1].lower_best <= w[0].lower_best)
}

/// Consecutive flights through a two-slot fix, by planned fix time, must
/// alternate slots.
fn staggered_slot_clashes(inst: &Instance) -> usize {
    let staggered = assign_handover_altitudes(inst, AltitudeMode::Staggered);
    let mut clashes = 0;
    for fix in staggered.fixes().iter().filter(|f| f.altitude_slots == 2) {
        let mut through: Vec<_> = staggered.flights().iter().filter(|f| f.fix_id == fix.id).collect();
        through.sort_by(|a, b| (a.planned_fix_time, &a.id).cmp(&(b.planned_fix_time, &b.id)));
        clashes += through
            .windows(2)
            .filter(|w| w[0].handover_altitude_slot == w[1].handover_altitude_slot)
            .count();
    }
    clashes
}

fn soundness_sweep() -> Sweep {
    let start = Instant::now();
    let algorithms = [Algorithm::Fcfs, Algorithm::BiGa, Algorithm::BiEga, Algorithm::BiSega];
    let mut s = Sweep {
        runs: 0,
        violations: 0,
        non_monotone: 0,
        bad_slots: 0,
        seconds: 0.0,
    };
    for i in 0..SWEEP_INSTANCES {
        let inst = generated(1 + (i % 6) as u8, i);
        let sc = scenario_of(&inst);
        s.bad_slots += staggered_slot_clashes(&inst);
        for alg in algorithms {
            for seed in 1..=SWEEP_SEEDS {
                let r = solve(&inst, &sc, &SolverConfig {
                    rng_seed: seed,
                    ..SolverConfig::with_algorithm(alg)
                })
                .unwrap();
                s.runs += 1;
                s.violations += r.violations(&inst).unwrap().len();
                if matches!(alg, Algorithm::BiEga | Algorithm::BiSega) && !trace_is_monotone(&r) {
                    s.non_monotone += 1;
                }
            }
        }
    }
    s.seconds = start.elapsed().as_secs_f64();
    s
}

fn oracle_equivalence() -> Outcome {
    let config = SolverConfig {
        algorithm: Algorithm::BiEga,
        population_size: 50,
        co_iterations: 30,
        time_step: ORACLE_GRID_S,
        ..SolverConfig::default()
    };
    let (mut matched, mut beaten) = (0, 0);
    for seed in 0..MICRO_INSTANCES {
        let inst = generate_micro_instance(3 + (seed % 4) as usize, seed).unwrap();
        let sc = ScenarioState::forced(seed % 2 == 0);
        let o = brute_force_oracle(&inst, &sc, &config, ORACLE_GRID_S).unwrap().objective;
        let g = solve(&inst, &sc, &SolverConfig {
            rng_seed: seed,
            ..config.clone()
        })
        .unwrap()
        .objective;
        let (ok, gk) = ((o.upper, o.lower), (g.upper, g.lower));
        matched += (ok == gk) as u64;
        beaten += (gk < ok) as u64;
    }
    let rate = matched as f64 / MICRO_INSTANCES as f64;
    outcome(
        rate >= ORACLE_MATCH_MIN && beaten == 0,
        format!("{matched}/{MICRO_INSTANCES} match ({:.1}%), {beaten} below oracle", rate * 100.0),
    )
}

fn medians_by_label(records: &[RunRecord], metric: impl Fn(&RunRecord) -> f64) -> BTreeMap<String, f64> {
    let mut by: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in records {
        by.entry(r.label.clone()).or_default().push(metric(r));
    }
    by.into_iter().map(|(k, v)| (k, median(&v))).collect()
}

fn fcfs_dominance() -> Outcome {
    let gas = [Algorithm::BiEga, Algorithm::BiSega];
    let jobs = comparison_jobs(&gas, &SolverConfig::default());
    let total_delay = |r: &RunRecord| (r.objective.components.arr_delay_total_s + r.objective.components.dep_delay_total_s) as f64;
    let span = |r: &RunRecord| r.objective.components.dep_rot_span_s as f64;

    let (mut np_ok, mut np_strict, mut pk_ok) = ([0; 2], [0; 2], [0; 2]);
    for i in 0..DOMINANCE_INSTANCES {
        for (peak, k) in [(false, 4 + (i % 3) as u8), (true, 1 + (i % 3) as u8)] {
            let inst = generated(k, 1000 + i);
            let sc = scenario_of(&inst);
            assert_eq!(sc.mas_peak, peak);
            let f = fcfs_schedule(&inst, &sc, &SolverConfig::default()).unwrap().objective.components;
            let records = run_jobs(&inst, &sc, &jobs, &seeds(DOMINANCE_SEEDS), 0).unwrap();
            for (a, alg) in gas.iter().enumerate() {
                let label = alg.name().to_string();
                if peak {
                    let m = medians_by_label(&records, span)[&label];
                    pk_ok[a] += (m <= f.dep_rot_span_s as f64) as u64;
                } else {
                    let m = medians_by_label(&records, total_delay)[&label];
                    let base = (f.arr_delay_total_s + f.dep_delay_total_s) as f64;
                    np_ok[a] += (m <= base) as u64;
                    np_strict[a] += (m < base) as u64;
                }
            }
        }
    }
    let n = DOMINANCE_INSTANCES;
    let strict_needed = (STRICT_IMPROVEMENT_MIN * n as f64).ceil() as u64;
    let pass = (0..2).all(|a| np_ok[a] == n && np_strict[a] >= strict_needed && pk_ok[a] == n);
    outcome(
        pass,
        format!(
            "non-peak delay <= FCFS: bi-ega {}/{n} (strict {}), bi-sega {}/{n} (strict {}); peak span <= FCFS: bi-ega {}/{n}, bi-sega {}/{n}",
            np_ok[0], np_strict[0], np_ok[1], np_strict[1], pk_ok[0], pk_ok[1]
        ),
    )
}

fn order_shift_parity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = 0;
    for _ in 0..PERMUTATIONS {
        let n = rng.gen_range(1..=10usize);
        let mut b = InstanceBuilder::shanghai();
        for i in 0..n {
            b = b.flight(FlightSpec::arrival(&format!("A{i:02}"), ZSPD, "16L/34R", "AF1").at(2000 + 120 * i as i64));
        }
        let inst = b.build().unwrap();
        let ctx = ObjectiveContext::new(&inst, &ScenarioState::forced(true), &ObjectiveOptions::default());
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let landing: Vec<i64> = perm.iter().map(|&p| 2000 + 120 * p as i64).collect();
        let shift = ctx.order_shift(&landing);
        let direct: i64 = perm.iter().enumerate().map(|(i, &p)| (i as i64 - p as i64).abs()).sum();
        let identity = perm.iter().enumerate().all(|(i, &p)| i == p);
        if shift != direct || shift % 2 != 0 || (shift == 0) != identity {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{PERMUTATIONS} permutations, {bad} failing"))
}

fn ablation_direction() -> Outcome {
    let base = SolverConfig::with_algorithm(Algorithm::BiEga);
    let jobs = ablation_jobs(&base);
    let mut held = 0;
    let mut total = 0;
    let mut misses = Vec::new();
    for i in 0..ABLATION_INSTANCES {
        for k in [1 + (i % 3) as u8, 4 + (i % 3) as u8] {
            let inst = generated(k, 2000 + i);
            let sc = scenario_of(&inst);
            let records = run_jobs(&inst, &sc, &jobs, &seeds(ABLATION_SEEDS), 0).unwrap();
            let upper = medians_by_label(&records, |r| r.objective.upper);
            let lower = medians_by_label(&records, |r| r.objective.lower);
            for label in ["no-crsspf", "no-saha", "no-crsspf-no-saha"] {
                total += 1;
                let ok = lower["full"] <= lower[label] && (sc.mas_peak || upper["full"] <= upper[label]);
                if ok {
                    held += 1;
                } else {
                    misses.push(format!("S{k}#{i} {label}"));
                }
            }
        }
    }
    misses.truncate(6);
    outcome(held == total, format!("full <= ablation in {held}/{total} comparisons; first misses {misses:?}"))
}

fn result_bytes(inst: &Instance, sc: &ScenarioState, config: &SolverConfig) -> (Vec<u8>, Vec<u8>) {
    let r = solve(inst, sc, config).unwrap();
    let (mut result, mut trace) = (Vec::new(), Vec::new());
    write_result(&r, inst, sc, &mut result, Some(&mut trace)).unwrap();
    (result, trace)
}

fn determinism() -> Outcome {
    let cases: Vec<(Instance, SolverConfig)> = (0..6u64)
        .flat_map(|i| {
            let inst = generated(1 + i as u8, 3000 + i);
            [Algorithm::BiGa, Algorithm::BiEga, Algorithm::BiSega]
                .into_iter()
                .map(move |a| (inst.clone(), SolverConfig { rng_seed: i, ..SolverConfig::with_algorithm(a) }))
        })
        .collect();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            cases
                .par_iter()
                .map(|(inst, cfg)| result_bytes(inst, &scenario_of(inst), cfg))
                .collect::<Vec<_>>()
        })
    };
    let first = run(1);
    let same_twice = first == run(1);
    let same_threads = first == run(4);
    outcome(
        same_twice && same_threads,
        format!("{} runs: repeat identical {same_twice}, 1 vs 4 threads identical {same_threads}", cases.len()),
    )
}

fn main() -> ExitCode {
    let started = Instant::now();
    let sweep = soundness_sweep();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 threshold reproduction", thresholds()),
        ("2 separation tables", separation_tables()),
        (
            "3 feasibility soundness",
            outcome(
                sweep.violations == 0 && sweep.seconds < SWEEP_RUNTIME_S,
                format!("{} runs, {} violations, {:.1} s", sweep.runs, sweep.violations, sweep.seconds),
            ),
        ),
        ("4 oracle equivalence", oracle_equivalence()),
        ("5 FCFS dominance", fcfs_dominance()),
        ("6 order-shift parity", order_shift_parity()),
        (
            "7 staggered altitudes",
            outcome(sweep.bad_slots == 0, format!("{} consecutive same-slot pairs", sweep.bad_slots)),
        ),
        ("8 ablation direction", ablation_direction()),
        ("9 determinism", determinism()),
        (
            "10 monotone elitism",
            outcome(sweep.non_monotone == 0, format!("{} non-monotone elitist traces", sweep.non_monotone)),
        ),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += !o.pass as usize;
    }
    println!("{}/{} criteria passed in {:.1} s", results.len() - failed, results.len(), started.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
