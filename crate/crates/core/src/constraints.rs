//! Feasibility checking of complete schedules.
//!
//! Every pairwise clause carries an applicability guard evaluated on
//! *planned* times, so the set of constrained pairs depends only on the
//! instance. Separations are satisfied when `later >= earlier + sep`.
//! Where a guard orders two flights with equal planned times, the flight
//! with the smaller id leads.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::{Flight, FlightKind, FlightTimes, Instance, Schedule, Seconds};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConstraintKind {
    ArrWake,
    DepWake,
    DepClearanceFix,
    DepArrRunway,
    CrsSamePathArr,
    CrsSamePathDep,
    HandoverArr,
    HandoverDep,
    RunwayCrossing,
    CpsArr,
    CpsDep,
    TimeLinkArr,
    TimeLinkDep,
}

impl ConstraintKind {
    pub const PAIRWISE: [ConstraintKind; 9] = [
        ConstraintKind::ArrWake,
        ConstraintKind::DepWake,
        ConstraintKind::DepClearanceFix,
        ConstraintKind::DepArrRunway,
        ConstraintKind::CrsSamePathArr,
        ConstraintKind::CrsSamePathDep,
        ConstraintKind::HandoverArr,
        ConstraintKind::HandoverDep,
        ConstraintKind::RunwayCrossing,
    ];

    pub const PER_FLIGHT: [ConstraintKind; 4] = [
        ConstraintKind::CpsArr,
        ConstraintKind::CpsDep,
        ConstraintKind::TimeLinkArr,
        ConstraintKind::TimeLinkDep,
    ];

    pub fn is_pairwise(self) -> bool {
        Self::PAIRWISE.contains(&self)
    }

    /// The same-path order-preservation clauses toggled by `crsspf`.
    pub fn is_same_path(self) -> bool {
        matches!(self, ConstraintKind::CrsSamePathArr | ConstraintKind::CrsSamePathDep)
    }
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ConstraintKind,
    /// One flight for per-flight clauses; leader then follower for pairs.
    pub flights: Vec<String>,
    pub deficit_seconds: Seconds,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    NotApplicable,
    Satisfied,
    Violated(Violation),
}

impl Verdict {
    pub fn violation(self) -> Option<Violation> {
        match self {
            Verdict::Violated(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOptions {
    /// Enforce same-path order preservation at both levels.
    pub crsspf: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { crsspf: true }
    }
}

pub fn check_schedule(instance: &Instance, schedule: &Schedule) -> Result<Vec<Violation>> {
    check_schedule_with(instance, schedule, &CheckOptions::default())
}

/// All violations of the schedule, sorted by kind then flights. An empty
/// report means the schedule is feasible.
pub fn check_schedule_with(instance: &Instance, schedule: &Schedule, opts: &CheckOptions) -> Result<Vec<Violation>> {
    schedule.ensure_covers(instance)?;
    let flights = instance.flights();
    let times: Vec<&FlightTimes> = flights
        .iter()
        .map(|f| schedule.get(&f.id).expect("coverage checked"))
        .collect();

    let mut out = Vec::new();
    for (i, f) in flights.iter().enumerate() {
        for kind in ConstraintKind::PER_FLIGHT {
            if let Verdict::Violated(v) = flight_verdict(kind, instance, f, times[i]) {
                out.push(v);
            }
        }
    }
    for i in 0..flights.len() {
        for j in i + 1..flights.len() {
            for kind in ConstraintKind::PAIRWISE {
                if kind.is_same_path() && !opts.crsspf {
                    continue;
                }
                if let Verdict::Violated(v) = pair_verdict(kind, instance, (&flights[i], times[i]), (&flights[j], times[j])) {
                    out.push(v);
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// True when no enabled pairwise clause is violated by the two entries.
pub(crate) fn pair_satisfied(instance: &Instance, opts: &CheckOptions, a: Entry<'_>, b: Entry<'_>) -> bool {
    ConstraintKind::PAIRWISE
        .into_iter()
        .filter(|k| opts.crsspf || !k.is_same_path())
        .all(|k| !matches!(pair_verdict(k, instance, a, b), Verdict::Violated(_)))
}

/// Verdict of a single pairwise clause on two flights, in either argument
/// order.
pub fn check_pair(kind: ConstraintKind, instance: &Instance, schedule: &Schedule, a: &str, b: &str) -> Result<Verdict> {
    if !kind.is_pairwise() {
        return Err(Error::Contract(format!("{kind} is a per-flight clause")));
    }
    let (fa, ta) = lookup(instance, schedule, a)?;
    let (fb, tb) = lookup(instance, schedule, b)?;
    Ok(pair_verdict(kind, instance, (fa, ta), (fb, tb)))
}

/// Verdict of a per-flight clause.
pub fn check_flight(kind: ConstraintKind, instance: &Instance, schedule: &Schedule, flight: &str) -> Result<Verdict> {
    if kind.is_pairwise() {
        return Err(Error::Contract(format!("{kind} is a pairwise clause")));
    }
    let (f, t) = lookup(instance, schedule, flight)?;
    Ok(flight_verdict(kind, instance, f, t))
}

fn lookup<'a>(instance: &'a Instance, schedule: &'a Schedule, id: &str) -> Result<(&'a Flight, &'a FlightTimes)> {
    let f = instance.flight(id).ok_or_else(|| Error::UnknownFlight(id.to_string()))?;
    let t = schedule.get(id).ok_or_else(|| Error::MissingFlight(id.to_string()))?;
    Ok((f, t))
}

type Entry<'a> = (&'a Flight, &'a FlightTimes);

fn planned_before(x: &Flight, y: &Flight, key: fn(&Flight) -> Seconds) -> bool {
    (key(x), &x.id) < (key(y), &y.id)
}

/// Orders the pair by a planned-time key, leader first.
fn by_plan<'a>(a: Entry<'a>, b: Entry<'a>, key: fn(&Flight) -> Seconds) -> (Entry<'a>, Entry<'a>) {
    if planned_before(a.0, b.0, key) {
        (a, b)
    } else {
        (b, a)
    }
}

fn planned_runway(f: &Flight) -> Seconds {
    f.planned_runway_time
}

fn planned_fix(f: &Flight) -> Seconds {
    f.planned_fix_time
}

fn require(kind: ConstraintKind, lead: &Flight, follow: &Flight, gap: Seconds, sep: Seconds) -> Verdict {
    if gap >= sep {
        Verdict::Satisfied
    } else {
        Verdict::Violated(Violation {
            kind,
            flights: vec![lead.id.clone(), follow.id.clone()],
            deficit_seconds: sep - gap,
        })
    }
}

fn close_pair(instance: &Instance, a: &Flight, b: &Flight) -> bool {
    a.airport_id == b.airport_id
        && instance
            .airport(&a.airport_id)
            .is_some_and(|ap| ap.close_pair_unchecked(&a.runway_id, &b.runway_id))
}

fn pair_verdict(kind: ConstraintKind, instance: &Instance, a: Entry<'_>, b: Entry<'_>) -> Verdict {
    use ConstraintKind::*;
    use FlightKind::*;
    let cfg = instance.separation();
    let (fa, fb) = (a.0, b.0);
    let same_airport = fa.airport_id == fb.airport_id;

    match kind {
        ArrWake => {
            if fa.kind != Arrival || fb.kind != Arrival || !same_airport || fa.runway_id != fb.runway_id {
                return Verdict::NotApplicable;
            }
            let ((l, lt), (f, ft)) = by_plan(a, b, planned_runway);
            let sep = cfg.wake(f.class, l.class, Arrival);
            require(kind, l, f, ft.runway_time - lt.runway_time, sep)
        }
        DepWake => {
            if fa.kind != Departure || fb.kind != Departure || !same_airport || fa.runway_id != fb.runway_id {
                return Verdict::NotApplicable;
            }
            let ((l, lt), (f, ft)) = by_plan(a, b, planned_runway);
            let sep = cfg.wake(f.class, l.class, Departure);
            require(kind, l, f, ft.runway_time - lt.runway_time, sep)
        }
        DepClearanceFix => {
            if fa.kind != Departure || fb.kind != Departure || !same_airport || fa.fix_id != fb.fix_id {
                return Verdict::NotApplicable;
            }
            let ((l, lt), (f, ft)) = by_plan(a, b, planned_runway);
            require(kind, l, f, ft.runway_time - lt.runway_time, cfg.clearance_sep)
        }
        DepArrRunway => {
            let ((dep, dt), (arr, at)) = match (fa.kind, fb.kind) {
                (Departure, Arrival) => (a, b),
                (Arrival, Departure) => (b, a),
                _ => return Verdict::NotApplicable,
            };
            if !close_pair(instance, dep, arr) || arr.planned_runway_time <= dep.planned_runway_time {
                return Verdict::NotApplicable;
            }
            require(kind, dep, arr, at.runway_time - dt.runway_time, cfg.dep_clear_time)
        }
        RunwayCrossing => {
            let ((arr, at), (dep, dt)) = match (fa.kind, fb.kind) {
                (Arrival, Departure) => (a, b),
                (Departure, Arrival) => (b, a),
                _ => return Verdict::NotApplicable,
            };
            if !close_pair(instance, arr, dep) {
                return Verdict::NotApplicable;
            }
            let vacate = arr.vacate_time(cfg);
            if dep.planned_runway_time <= arr.planned_runway_time + vacate {
                return Verdict::NotApplicable;
            }
            let end_around = instance.airport(&arr.airport_id).is_some_and(|ap| ap.has_end_around_taxiway);
            if end_around && arr.wingspan_m < cfg.crossing_wingspan_threshold_m {
                return Verdict::NotApplicable;
            }
            require(kind, arr, dep, dt.runway_time - at.runway_time, vacate + cfg.cross_time)
        }
        CrsSamePathArr => {
            if fa.kind != Arrival || fb.kind != Arrival || !same_airport || fa.fix_id != fb.fix_id {
                return Verdict::NotApplicable;
            }
            let ((l, lt), (f, ft)) = by_plan(a, b, planned_fix);
            require(kind, l, f, ft.runway_time - lt.runway_time, 1)
        }
        CrsSamePathDep => {
            if fa.kind != Departure || fb.kind != Departure || !same_airport || fa.fix_id != fb.fix_id {
                return Verdict::NotApplicable;
            }
            let ((l, lt), (f, ft)) = by_plan(a, b, planned_runway);
            require(kind, l, f, ft.fix_time - lt.fix_time, 1)
        }
        HandoverArr => {
            if fa.kind != Arrival
                || fb.kind != Arrival
                || fa.fix_id != fb.fix_id
                || fa.handover_altitude_slot != fb.handover_altitude_slot
            {
                return Verdict::NotApplicable;
            }
            let ((l, lt), (f, ft)) = by_plan(a, b, planned_fix);
            require(kind, l, f, (ft.fix_time - lt.fix_time).abs(), cfg.handover_sep_arr)
        }
        HandoverDep => {
            if fa.kind != Departure
                || fb.kind != Departure
                || fa.fix_id != fb.fix_id
                || fa.handover_altitude_slot != fb.handover_altitude_slot
            {
                return Verdict::NotApplicable;
            }
            let ((l, lt), (f, ft)) = by_plan(a, b, planned_fix);
            require(kind, l, f, ft.fix_time - lt.fix_time, cfg.handover_sep_dep)
        }
        CpsArr | CpsDep | TimeLinkArr | TimeLinkDep => Verdict::NotApplicable,
    }
}

fn flight_verdict(kind: ConstraintKind, instance: &Instance, f: &Flight, t: &FlightTimes) -> Verdict {
    use ConstraintKind::*;
    let cfg = instance.separation();
    let violated = |deficit: Seconds| {
        if deficit > 0 {
            Verdict::Violated(Violation {
                kind,
                flights: vec![f.id.clone()],
                deficit_seconds: deficit,
            })
        } else {
            Verdict::Satisfied
        }
    };
    let seg = instance.segment_times().lookup(f).0;
    match (kind, f.kind) {
        (CpsArr, FlightKind::Arrival) => {
            let (lo, hi) = f.position_shift_window(cfg.position_shift_offset);
            violated((lo - t.fix_time).max(t.fix_time - hi))
        }
        (CpsDep, FlightKind::Departure) => {
            let (lo, hi) = f.position_shift_window(cfg.position_shift_offset);
            violated((lo - t.runway_time).max(t.runway_time - hi))
        }
        (TimeLinkArr, FlightKind::Arrival) => violated((t.runway_time - (t.fix_time + seg)).abs()),
        (TimeLinkDep, FlightKind::Departure) => violated((t.fix_time - (t.runway_time + seg)).abs()),
        _ => Verdict::NotApplicable,
    }
}
