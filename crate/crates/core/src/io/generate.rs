use std::fmt;
use std::str::FromStr;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::builder::{FlightSpec, InstanceBuilder, SHANGHAI_ARRIVAL_FIXES, SHANGHAI_DEPARTURE_FIXES, SHANGHAI_RUNWAY_ROLES, ZSPD, ZSSS};
use crate::domain::{AircraftClass, Instance, Seconds};
use crate::error::{Error, Result};
use crate::scenario::AltitudeMode;
use crate::solver::feasibility::CompiledModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Template {
    Shanghai,
}

impl FromStr for Template {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shanghai" => Ok(Template::Shanghai),
            _ => Err(Error::Config(format!("unknown template `{s}`"))),
        }
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("shanghai")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AirportCounts {
    pub airport: String,
    pub arrivals: usize,
    pub departures: usize,
}

impl AirportCounts {
    pub fn new(airport: &str, arrivals: usize, departures: usize) -> Self {
        Self {
            airport: airport.into(),
            arrivals,
            departures,
        }
    }
}

/// Window counts that land a template instance in scenario row `k`
/// (thresholds: system 19, ZSSS 7, ZSPD 12).
pub fn scenario_counts(template: Template, k: u8) -> Result<Vec<AirportCounts>> {
    let Template::Shanghai = template;
    let (zsss, zspd) = match k {
        1 => (8, 11),
        2 => (6, 13),
        3 => (8, 12),
        4 => (7, 6),
        5 => (4, 12),
        6 => (3, 5),
        _ => return Err(Error::Config(format!("scenario must be 1..=6, got {k}"))),
    };
    let split = |n: usize| (n / 2, n - n / 2);
    let (a, d) = split(zsss);
    let (b, e) = split(zspd);
    Ok(vec![AirportCounts::new(ZSSS, a, d), AirportCounts::new(ZSPD, b, e)])
}

const CLASS_WEIGHTS: [(AircraftClass, u32); 4] = [
    (AircraftClass::A380, 2),
    (AircraftClass::Heavy, 25),
    (AircraftClass::Medium, 65),
    (AircraftClass::Light, 8),
];

fn wingspan(class: AircraftClass, rng: &mut ChaCha8Rng) -> f64 {
    let choices: &[f64] = match class {
        AircraftClass::A380 => &[79.8],
        AircraftClass::Heavy => &[60.3, 64.8],
        AircraftClass::Medium => &[34.1, 35.8, 38.0],
        AircraftClass::Light => &[26.0, 28.7],
    };
    *choices.choose(rng).expect("non-empty")
}

struct Sampler {
    rng: ChaCha8Rng,
    classes: WeightedIndex<u32>,
}

impl Sampler {
    fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            classes: WeightedIndex::new(CLASS_WEIGHTS.iter().map(|&(_, w)| w)).expect("positive weights"),
        }
    }

    fn dress(&mut self, spec: FlightSpec, start: Seconds, span: Seconds) -> FlightSpec {
        let class = CLASS_WEIGHTS[self.classes.sample(&mut self.rng)].0;
        let ws = wingspan(class, &mut self.rng);
        let t = self.rng.gen_range(start..start + span);
        spec.class(class).wingspan(ws).at(t)
    }
}

fn roles(airport: &str) -> Option<(&'static [&'static str], &'static [&'static str])> {
    SHANGHAI_RUNWAY_ROLES.iter().find(|r| r.0 == airport).map(|r| (r.1, r.2))
}

/// FCFS finds a schedule under every combination of the ablation switches.
fn fcfs_feasible(instance: &Instance, step: Seconds) -> bool {
    [true, false].into_iter().all(|crsspf| {
        [AltitudeMode::Staggered, AltitudeMode::FixedByAirport].into_iter().all(|mode| {
            let inst = crate::scenario::assign_handover_altitudes(instance, mode);
            CompiledModel::new(&inst, crsspf, step)
                .and_then(|m| m.greedy(&inst, &vec![None; m.len()]))
                .is_ok()
        })
    })
}

const MAX_ATTEMPTS: usize = 10_000;

/// Synthetic template instance with the given flights per airport, all
/// planned inside the classification window. Runways and fixes are assigned
/// round-robin per airport within the runway roles; planned fix times are
/// back-computed from the segment-time table. Draws are repeated (on the
/// same random stream) until FCFS is feasible under every ablation setting.
pub fn generate_instance(template: Template, counts: &[AirportCounts], seed: u64) -> Result<Instance> {
    let Template::Shanghai = template;
    for c in counts {
        if roles(&c.airport).is_none() {
            return Err(Error::Config(format!("template has no airport `{}`", c.airport)));
        }
    }
    let window = crate::builder::SHANGHAI_WINDOW;
    let mut s = Sampler::new(seed);
    let mut last = None;
    for _ in 0..MAX_ATTEMPTS {
        let mut b = InstanceBuilder::shanghai();
        for c in counts {
            let (arr_rw, dep_rw) = roles(&c.airport).expect("checked above");
            let offset = if c.airport == ZSSS { 0 } else { 2 };
            for i in 0..c.arrivals {
                let fix = SHANGHAI_ARRIVAL_FIXES[(i + offset) % SHANGHAI_ARRIVAL_FIXES.len()].0;
                let spec = FlightSpec::arrival(&format!("{}-A{:02}", c.airport, i + 1), &c.airport, arr_rw[i % arr_rw.len()], fix);
                b = b.flight(s.dress(spec, window.window_start, window.window_seconds));
            }
            for i in 0..c.departures {
                let fix = SHANGHAI_DEPARTURE_FIXES[(i + 2 * offset) % SHANGHAI_DEPARTURE_FIXES.len()].0;
                let spec = FlightSpec::departure(&format!("{}-D{:02}", c.airport, i + 1), &c.airport, dep_rw[i % dep_rw.len()], fix);
                b = b.flight(s.dress(spec, window.window_start, window.window_seconds));
            }
        }
        let inst = b.build()?;
        if fcfs_feasible(&inst, 1) {
            return Ok(inst);
        }
        last = Some(inst);
    }
    Ok(last.expect("at least one attempt"))
}

/// A tiny template instance for exhaustive comparison: `flights` flights
/// with random airport, direction, runway and one of the first three fixes
/// of each direction, planned within 240 s so that clauses interact. FCFS
/// is feasible on both the 1 s and 30 s grids.
pub fn generate_micro_instance(flights: usize, seed: u64) -> Result<Instance> {
    let window = crate::builder::SHANGHAI_WINDOW;
    let mut s = Sampler::new(seed);
    let airports = [ZSSS, ZSPD];
    for _ in 0..MAX_ATTEMPTS {
        let mut b = InstanceBuilder::shanghai();
        for i in 0..flights {
            let airport = *airports.choose(&mut s.rng).expect("non-empty");
            let (arr_rw, dep_rw) = roles(airport).expect("template airport");
            let id = format!("F{}", i + 1);
            let spec = if s.rng.gen_bool(0.5) {
                let fix = SHANGHAI_ARRIVAL_FIXES[s.rng.gen_range(0..3)].0;
                FlightSpec::arrival(&id, airport, arr_rw.choose(&mut s.rng).expect("runway"), fix)
            } else {
                let fix = SHANGHAI_DEPARTURE_FIXES[s.rng.gen_range(0..3)].0;
                FlightSpec::departure(&id, airport, dep_rw.choose(&mut s.rng).expect("runway"), fix)
            };
            b = b.flight(s.dress(spec, window.window_start, 240));
        }
        let inst = b.build()?;
        if fcfs_feasible(&inst, 1) && fcfs_feasible(&inst, 30) {
            return Ok(inst);
        }
    }
    Err(Error::Config(format!("no FCFS-feasible micro instance after {MAX_ATTEMPTS} draws")))
}
