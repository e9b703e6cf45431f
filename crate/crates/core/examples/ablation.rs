//! Same-path ordering and altitude staggering switched on and off.
//!
//! cargo run --release --example ablation -- [seeds]

use metroplex::experiment::{ablation_jobs, parse_seeds, render_table, run_jobs, summarize};
use metroplex::io::shanghai_fixture;
use metroplex::scenario::{classify_scenario, compute_thresholds};
use metroplex::SolverConfig;

fn main() -> metroplex::Result<()> {
    let seeds = parse_seeds(&std::env::args().nth(1).unwrap_or_else(|| "1..5".into()))?;
    let inst = shanghai_fixture();
    let sc = classify_scenario(&inst, &compute_thresholds(&inst));
    let records = run_jobs(&inst, &sc, &ablation_jobs(&SolverConfig::default()), &seeds, 0)?;
    print!("{}", render_table(&summarize(&records)));
    Ok(())
}
