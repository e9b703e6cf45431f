//! Fix-to-runway conversions from the segment-time table.
//!
//! cargo run --example segment_times

use metroplex::flight_time::{fix_time_from_runway, runway_time_from_fix};
use metroplex::io::shanghai_fixture;

fn main() {
    let inst = shanghai_fixture();
    let table = inst.segment_times();
    println!("{} table entries, default {} s", table.len(), table.default_seconds);
    for f in inst.flights().iter().take(8) {
        let (seg, fallback) = table.lookup(f);
        let fix = fix_time_from_runway(f, f.planned_runway_time, table);
        assert_eq!(runway_time_from_fix(f, fix, table), f.planned_runway_time);
        println!(
            "{:<10} {:?} {} {} via {}: segment {seg} s{}, runway {} <-> fix {fix}",
            f.id,
            f.kind,
            f.airport_id,
            f.runway_id,
            f.fix_id,
            if fallback { " (default)" } else { "" },
            f.planned_runway_time
        );
    }
}
