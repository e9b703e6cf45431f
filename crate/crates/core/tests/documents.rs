//! Round trips of instance, result and trace documents through disk.

use metroplex::io::{
    generate_instance, parse_result, parse_trace, read_instance, save_instance, scenario_counts, write_instance,
    write_result, Template,
};
use metroplex::scenario::{classify_scenario, compute_thresholds};
use metroplex::{solve, Algorithm, SolverConfig};

#[test]
fn every_scenario_survives_disk() {
    let dir = tempfile::tempdir().unwrap();
    for k in 1..=6 {
        let inst = generate_instance(Template::Shanghai, &scenario_counts(Template::Shanghai, k).unwrap(), 11).unwrap();
        let path = dir.path().join(format!("s{k}.json"));
        save_instance(&inst, &path).unwrap();
        let back = read_instance(&path).unwrap();
        assert_eq!(back.instance, inst);
        assert!(back.warnings.is_empty());
        assert_eq!(write_instance(&back.instance), std::fs::read_to_string(&path).unwrap());
    }
}

#[test]
fn result_document_matches_solver_output() {
    let inst = metroplex::io::shanghai_fixture();
    let sc = classify_scenario(&inst, &compute_thresholds(&inst));
    for alg in [Algorithm::Fcfs, Algorithm::BiGa, Algorithm::BiEga] {
        let r = solve(&inst, &sc, &SolverConfig { rng_seed: 3, ..SolverConfig::with_algorithm(alg) }).unwrap();
        let (mut out, mut trace) = (Vec::new(), Vec::new());
        write_result(&r, &inst, &sc, &mut out, Some(&mut trace)).unwrap();
        let doc = parse_result(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(doc.schedule(), r.schedule);
        assert_eq!(doc.objective, r.objective);
        assert_eq!(doc.algorithm, alg);
        assert_eq!(parse_trace(std::str::from_utf8(&trace).unwrap()).unwrap(), r.convergence);
    }
}
