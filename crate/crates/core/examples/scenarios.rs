//! Peak thresholds and scenario classification for generated traffic.
//!
//! cargo run --example scenarios -- [seed]

use metroplex::io::{generate_instance, scenario_counts, Template};
use metroplex::scenario::{classify_scenario, compute_thresholds, window_counts};

fn main() -> metroplex::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let t = compute_thresholds(&metroplex::io::shanghai_fixture());
    println!("thresholds per {} s window: system {}, {:?}", t.window_seconds, t.mas, t.per_airport);

    for k in 1..=6 {
        let inst = generate_instance(Template::Shanghai, &scenario_counts(Template::Shanghai, k)?, seed)?;
        let counts = window_counts(&inst);
        let sc = classify_scenario(&inst, &compute_thresholds(&inst));
        let total: u32 = counts.iter().map(|(_, c)| c).sum();
        println!(
            "target {k}: counts {counts:?} (system {total}) -> scenario {}, {}",
            sc.scenario_index,
            if sc.is_peak() { "peak" } else { "non-peak" }
        );
    }
    Ok(())
}
