//! FCFS against the three GA variants on the bundled instance.
//!
//! cargo run --release --example solve -- [seed]

use metroplex::io::shanghai_fixture;
use metroplex::scenario::{classify_scenario, compute_thresholds};
use metroplex::{solve, Algorithm, SolverConfig};

fn main() -> metroplex::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let inst = shanghai_fixture();
    let sc = classify_scenario(&inst, &compute_thresholds(&inst));
    println!("{} flights, scenario {}, peak {}", inst.flights().len(), sc.scenario_index, sc.is_peak());

    for alg in [Algorithm::Fcfs, Algorithm::BiGa, Algorithm::BiEga, Algorithm::BiSega] {
        let r = solve(&inst, &sc, &SolverConfig { rng_seed: seed, ..SolverConfig::with_algorithm(alg) })?;
        let c = r.objective.components;
        println!(
            "{:<8} upper {:>7} lower {:>7}  order shift {} arr delay {} s span {} s dep delay {} s  ({} co-iterations)",
            alg.name(),
            r.objective.upper,
            r.objective.lower,
            c.arr_order_shift_total,
            c.arr_delay_total_s,
            c.dep_rot_span_s,
            c.dep_delay_total_s,
            r.convergence.len()
        );
    }

    let best = solve(&inst, &sc, &SolverConfig { rng_seed: seed, ..SolverConfig::default() })?;
    println!("\nbi-ega schedule (planned -> scheduled runway time)");
    for f in inst.flights() {
        let t = best.schedule.get(&f.id).expect("every flight is scheduled");
        println!("  {:<10} {:?} {:>6} -> {:>6}", f.id, f.kind, f.planned_runway_time, t.runway_time);
    }
    Ok(())
}
