//! Generates an instance, writes it as JSON, reads it back and stores a
//! solve result next to it.
//!
//! cargo run --release --example documents -- [scenario] [seed]

use metroplex::io::{generate_instance, read_instance, save_instance, scenario_counts, write_result, Template};
use metroplex::scenario::{classify_scenario, compute_thresholds};
use metroplex::{solve, SolverConfig};

fn main() -> metroplex::Result<()> {
    let mut args = std::env::args().skip(1);
    let scenario: u8 = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);

    let dir = std::env::temp_dir().join(format!("metroplex-s{scenario}-{seed}"));
    std::fs::create_dir_all(&dir)?;
    let inst_path = dir.join("instance.json");
    let inst = generate_instance(Template::Shanghai, &scenario_counts(Template::Shanghai, scenario)?, seed)?;
    save_instance(&inst, &inst_path)?;

    let parsed = read_instance(&inst_path)?;
    assert_eq!(parsed.instance, inst);
    let sc = classify_scenario(&parsed.instance, &compute_thresholds(&parsed.instance));
    let r = solve(&parsed.instance, &sc, &SolverConfig { rng_seed: seed, ..SolverConfig::default() })?;

    let result_path = dir.join("result.json");
    let trace_path = dir.join("trace.csv");
    let mut out = std::fs::File::create(&result_path)?;
    let mut trace = std::fs::File::create(&trace_path)?;
    write_result(&r, &parsed.instance, &sc, &mut out, Some(&mut trace))?;
    println!("instance {}\nresult   {}\ntrace    {}", inst_path.display(), result_path.display(), trace_path.display());
    Ok(())
}
