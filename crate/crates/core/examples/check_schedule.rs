//! Builds a three-flight instance, breaks one separation on purpose and
//! prints the constraint report.
//!
//! cargo run --example check_schedule

use metroplex::builder::{FlightSpec, InstanceBuilder, ZSPD};
use metroplex::constraints::check_schedule;
use metroplex::{AircraftClass, FlightTimes, Schedule};

fn main() -> metroplex::Result<()> {
    let inst = InstanceBuilder::shanghai()
        .flight(FlightSpec::arrival("H1", ZSPD, "16L/34R", "AF1").class(AircraftClass::Heavy).wingspan(60.0).at(2000))
        .flight(FlightSpec::arrival("M1", ZSPD, "16L/34R", "AF2").class(AircraftClass::Medium).at(2060))
        .flight(FlightSpec::departure("D1", ZSPD, "16R/34L", "DF1").at(2100))
        .build()?;

    let mut schedule = Schedule::planned(&inst);
    println!("planned: {} violations", check_schedule(&inst, &schedule)?.len());
    for v in check_schedule(&inst, &schedule)? {
        println!("  {} {} deficit {} s", v.kind, v.flights.join(" -> "), v.deficit_seconds);
    }

    // Landing the Medium right behind the Heavy breaks arrival wake spacing.
    let fix = inst.flight("M1").map(|f| f.planned_fix_time).unwrap_or_default() - 30;
    schedule.insert("M1", FlightTimes { fix_time: fix, runway_time: 2030 });
    let report = check_schedule(&inst, &schedule)?;
    println!("M1 at 2030: {} violations", report.len());
    for v in report {
        println!("  {} {} deficit {} s", v.kind, v.flights.join(" -> "), v.deficit_seconds);
    }
    Ok(())
}
