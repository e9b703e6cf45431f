//! End-to-end runs of the `metroplex` binary.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn metroplex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metroplex")).args(args).output().expect("binary runs")
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn generate_solve_validate() {
    let dir = TempDir::new().unwrap();
    let inst = p(&dir, "s3.json");
    let o = metroplex(&["generate", "--template", "shanghai", "--scenario", "3", "--seed", "4", "-o", &inst]);
    assert!(o.status.success(), "{o:?}");

    let o = metroplex(&["validate", &inst]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("scenario 3"), "{}", stdout(&o));

    let (result, trace) = (p(&dir, "r.json"), p(&dir, "t.csv"));
    let o = metroplex(&["solve", &inst, "--algorithm", "bi-sega", "--seed", "2", "--co-iterations", "6", "-o", &result, "--trace", &trace]);
    assert!(o.status.success(), "{o:?}");
    let doc = metroplex::io::parse_result(&std::fs::read_to_string(&result).unwrap()).unwrap();
    assert_eq!(doc.algorithm, metroplex::Algorithm::BiSega);
    assert!(doc.violations.is_empty());
    let rows = metroplex::io::parse_trace(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert!(!rows.is_empty() && rows.len() <= 6);

    // A result document is itself a schedule document.
    let o = metroplex(&["validate", &inst, &result]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("feasible"));
}

#[test]
fn solve_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let inst = p(&dir, "s1.json");
    assert!(metroplex(&["generate", "--scenario", "1", "--seed", "9", "-o", &inst]).status.success());
    let run = |tag: &str| {
        let (r, t) = (p(&dir, &format!("r{tag}.json")), p(&dir, &format!("t{tag}.csv")));
        assert!(metroplex(&["solve", &inst, "--seed", "5", "-o", &r, "--trace", &t]).status.success());
        (std::fs::read(r).unwrap(), std::fs::read(t).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn violating_schedule_exits_one() {
    let dir = TempDir::new().unwrap();
    let inst_path = p(&dir, "i.json");
    assert!(metroplex(&["generate", "--scenario", "3", "--seed", "1", "-o", &inst_path]).status.success());
    let inst = metroplex::io::read_instance(&inst_path).unwrap().instance;
    // Everyone at the planned time of the first flight.
    let t0 = inst.flights()[0].planned_runway_time;
    let schedule: serde_json::Map<String, serde_json::Value> = inst
        .flights()
        .iter()
        .map(|f| {
            let seg = inst.segment_time(inst.flight_position(&f.id).unwrap());
            let fix = if f.is_arrival() { t0 - seg } else { t0 + seg };
            (f.id.clone(), serde_json::json!({ "runway_time": t0, "fix_time": fix }))
        })
        .collect();
    let sched = p(&dir, "bad.json");
    std::fs::write(&sched, serde_json::json!({ "schedule": schedule }).to_string()).unwrap();
    let o = metroplex(&["validate", &inst_path, &sched]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("violations"));
}

#[test]
fn compare_and_ablate_print_tables() {
    let dir = TempDir::new().unwrap();
    let inst = p(&dir, "i.json");
    assert!(metroplex(&["generate", "--scenario", "5", "--seed", "3", "-o", &inst]).status.success());
    let csv = p(&dir, "s.csv");
    let o = metroplex(&["compare", &inst, "--algorithms", "fcfs,bi-ega", "--seeds", "1..3", "--co-iterations", "5", "--csv", &csv]);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    assert!(out.starts_with("config") && out.contains("bi-ega") && out.contains("fcfs"), "{out}");
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 3);

    let o = metroplex(&["ablate", &inst, "--seeds", "1,2", "--co-iterations", "3"]);
    assert!(o.status.success());
    for label in ["full", "no-crsspf", "no-saha", "no-crsspf-no-saha"] {
        assert!(stdout(&o).contains(label));
    }
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(metroplex(&["solve", "--bogus"]).status.code(), Some(2));
    assert_eq!(metroplex(&["generate", "--scenario", "7", "-o", "x.json"]).status.code(), Some(2));
    let o = metroplex(&["validate", "/nonexistent/instance.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));

    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"version": 1, "airports": []}"#).unwrap();
    let o = metroplex(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(Path::new(&bad).exists());
}
