//! Compares bi-EGA against the exhaustive oracle on random micro-instances.
//!
//! cargo run --release --example oracle_check -- [instances]

use metroplex::io::generate_micro_instance;
use metroplex::solver::{bilevel_solve, brute_force_oracle};
use metroplex::{Algorithm, ScenarioState, SolverConfig};

fn main() -> metroplex::Result<()> {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let config = SolverConfig {
        algorithm: Algorithm::BiEga,
        population_size: 50,
        co_iterations: 30,
        time_step: 30,
        ..SolverConfig::default()
    };
    let mut matched = 0;
    for seed in 0..n {
        let flights = 3 + (seed % 4) as usize;
        let inst = generate_micro_instance(flights, seed)?;
        let scenario = ScenarioState::forced(seed % 2 == 0);
        let oracle = brute_force_oracle(&inst, &scenario, &config, 30)?;
        let ga = bilevel_solve(&inst, &scenario, &SolverConfig { rng_seed: seed, ..config.clone() })?;
        let (o, g) = (oracle.objective, ga.objective);
        let hit = (o.upper, o.lower) == (g.upper, g.lower);
        matched += hit as u64;
        println!(
            "{seed:>3} flights={flights} peak={:<5} oracle=({}, {}) bi-ega=({}, {}) {}",
            scenario.mas_peak,
            o.upper,
            o.lower,
            g.upper,
            g.lower,
            if hit { "match" } else { "MISS" }
        );
    }
    println!("matched {matched}/{n}");
    Ok(())
}
