//! Handover altitude slots under both assignment modes.
//!
//! cargo run --example altitudes

use metroplex::io::shanghai_fixture;
use metroplex::scenario::{assign_handover_altitudes, AltitudeMode};

fn main() {
    let base = shanghai_fixture();
    let staggered = assign_handover_altitudes(&base, AltitudeMode::Staggered);
    let fixed = assign_handover_altitudes(&base, AltitudeMode::FixedByAirport);

    for fix in base.fixes().iter().filter(|f| f.altitude_slots > 1) {
        let mut members: Vec<usize> = (0..base.flights().len()).filter(|&i| base.flights()[i].fix_id == fix.id).collect();
        if members.len() < 2 {
            continue;
        }
        members.sort_by_key(|&i| (base.flights()[i].planned_fix_time, base.flights()[i].id.clone()));
        println!("{} ({} slots)", fix.id, fix.altitude_slots);
        for i in members {
            let f = &base.flights()[i];
            println!(
                "  {:<10} {} fix {:>5}  staggered {}  fixed-by-airport {}",
                f.id,
                f.airport_id,
                f.planned_fix_time,
                staggered.flights()[i].handover_altitude_slot,
                fixed.flights()[i].handover_altitude_slot
            );
        }
    }
}
