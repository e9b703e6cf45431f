//! Problem entities: airports, fixes, flights, separation parameters and
//! the validated [`Instance`] that ties them together.
//!
//! All times are integer seconds from the instance epoch.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flight_time::SegmentTimeTable;

pub type Seconds = i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AircraftClass {
    #[serde(rename = "A380-800")]
    A380,
    Heavy,
    Medium,
    Light,
}

impl AircraftClass {
    pub const ALL: [AircraftClass; 4] = [
        AircraftClass::A380,
        AircraftClass::Heavy,
        AircraftClass::Medium,
        AircraftClass::Light,
    ];

    /// Row/column index into the wake matrices.
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for AircraftClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AircraftClass::A380 => "A380-800",
            AircraftClass::Heavy => "Heavy",
            AircraftClass::Medium => "Medium",
            AircraftClass::Light => "Light",
        })
    }
}

/// Direction of a flight, and of the handover fix it crosses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlightKind {
    Arrival,
    Departure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Airport {
    pub id: String,
    pub runways: Vec<String>,
    /// Close parallel runway pairs operated dependently.
    pub close_pairs: Vec<(String, String)>,
    pub has_end_around_taxiway: bool,
    pub hourly_capacity_arr: u32,
    pub hourly_capacity_dep: u32,
}

impl Airport {
    pub fn has_runway(&self, runway: &str) -> bool {
        self.runways.iter().any(|r| r == runway)
    }

    /// Whether two runways form a close parallel pair. A runway is never
    /// paired with itself.
    pub fn are_close_pair(&self, rw_a: &str, rw_b: &str) -> Result<bool> {
        for rw in [rw_a, rw_b] {
            if !self.has_runway(rw) {
                return Err(Error::UnknownRunway {
                    airport: self.id.clone(),
                    runway: rw.to_string(),
                });
            }
        }
        Ok(self.close_pair_unchecked(rw_a, rw_b))
    }

    pub(crate) fn close_pair_unchecked(&self, rw_a: &str, rw_b: &str) -> bool {
        rw_a != rw_b
            && self
                .close_pairs
                .iter()
                .any(|(x, y)| (x == rw_a && y == rw_b) || (x == rw_b && y == rw_a))
    }

    pub fn hourly_capacity(&self) -> u32 {
        self.hourly_capacity_arr + self.hourly_capacity_dep
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandoverFix {
    pub id: String,
    pub direction: FlightKind,
    /// Number of handover altitudes available at the fix, 1 or 2.
    pub altitude_slots: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flight {
    pub id: String,
    pub kind: FlightKind,
    pub airport_id: String,
    pub runway_id: String,
    pub fix_id: String,
    pub class: AircraftClass,
    pub wingspan_m: f64,
    /// Planned handover-fix crossing time (arrival fix for arrivals,
    /// departure fix for departures).
    pub planned_fix_time: Seconds,
    /// Planned landing (ELDT) or take-off (ETOT) time.
    pub planned_runway_time: Seconds,
    pub handover_altitude_slot: u8,
    pub max_position_shift: u32,
    /// Per-flight runway vacate time; falls back to the configured default.
    pub vacate_time: Option<Seconds>,
}

impl Flight {
    pub fn is_arrival(&self) -> bool {
        self.kind == FlightKind::Arrival
    }

    /// The decision time the optimizer moves: fix crossing for arrivals,
    /// take-off for departures.
    pub fn planned_decision_time(&self) -> Seconds {
        match self.kind {
            FlightKind::Arrival => self.planned_fix_time,
            FlightKind::Departure => self.planned_runway_time,
        }
    }

    /// Inclusive bounds on the decision time. Arrivals may move either way by
    /// `mps * offset`; departures may only be delayed.
    pub fn position_shift_window(&self, offset: Seconds) -> (Seconds, Seconds) {
        let half = self.max_position_shift as Seconds * offset;
        let planned = self.planned_decision_time();
        match self.kind {
            FlightKind::Arrival => (planned - half, planned + half),
            FlightKind::Departure => (planned, planned + half),
        }
    }

    pub fn vacate_time(&self, cfg: &SeparationConfig) -> Seconds {
        self.vacate_time.unwrap_or(cfg.vacate_time)
    }
}

/// Square matrix indexed `[following][preceding]` by [`AircraftClass::index`].
pub type WakeMatrix = [[Seconds; 4]; 4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationConfig {
    pub wake_arrival: WakeMatrix,
    pub wake_departure: WakeMatrix,
    pub handover_sep_arr: Seconds,
    pub handover_sep_dep: Seconds,
    pub clearance_sep: Seconds,
    pub dep_clear_time: Seconds,
    pub vacate_time: Seconds,
    pub cross_time: Seconds,
    pub position_shift_offset: Seconds,
    pub crossing_wingspan_threshold_m: f64,
}

const MIN: Seconds = 60;

/// Arrival wake minima, row = following class, column = preceding class.
pub const DEFAULT_WAKE_ARRIVAL: WakeMatrix = [
    [MIN, 2 * MIN, 3 * MIN, 4 * MIN],
    [MIN, MIN, 2 * MIN, 3 * MIN],
    [MIN, MIN, MIN, 3 * MIN],
    [MIN, MIN, MIN, MIN],
];

/// Departure wake minima, row = following class, column = preceding class.
pub const DEFAULT_WAKE_DEPARTURE: WakeMatrix = [
    [MIN, 2 * MIN, 3 * MIN, 3 * MIN],
    [MIN, MIN, 2 * MIN, 2 * MIN],
    [MIN, MIN, MIN, 2 * MIN],
    [MIN, MIN, MIN, MIN],
];

impl Default for SeparationConfig {
    fn default() -> Self {
        Self {
            wake_arrival: DEFAULT_WAKE_ARRIVAL,
            wake_departure: DEFAULT_WAKE_DEPARTURE,
            handover_sep_arr: 90,
            handover_sep_dep: 135,
            clearance_sep: 120,
            dep_clear_time: 45,
            vacate_time: 45,
            cross_time: 45,
            position_shift_offset: 120,
            crossing_wingspan_threshold_m: 36.0,
        }
    }
}

impl SeparationConfig {
    pub fn wake(&self, following: AircraftClass, preceding: AircraftClass, kind: FlightKind) -> Seconds {
        let m = match kind {
            FlightKind::Arrival => &self.wake_arrival,
            FlightKind::Departure => &self.wake_departure,
        };
        m[following.index()][preceding.index()]
    }

    fn validate(&self) -> Result<()> {
        for (name, m) in [("wake_arrival", &self.wake_arrival), ("wake_departure", &self.wake_departure)] {
            for (i, row) in m.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    if v <= 0 {
                        return Err(Error::invalid(
                            format!("separation.{name}[{i}][{j}]"),
                            "wake separation must be positive",
                        ));
                    }
                }
            }
        }
        let scalars = [
            ("handover_sep_arr", self.handover_sep_arr),
            ("handover_sep_dep", self.handover_sep_dep),
            ("clearance_sep", self.clearance_sep),
            ("dep_clear_time", self.dep_clear_time),
            ("vacate_time", self.vacate_time),
            ("cross_time", self.cross_time),
            ("position_shift_offset", self.position_shift_offset),
        ];
        for (name, v) in scalars {
            if v <= 0 {
                return Err(Error::invalid(format!("separation.{name}"), "duration must be positive"));
            }
        }
        if !(self.crossing_wingspan_threshold_m > 0.0) {
            return Err(Error::invalid(
                "separation.crossing_wingspan_threshold_m",
                "threshold must be positive",
            ));
        }
        Ok(())
    }
}

/// Wake separation required between a following and a preceding aircraft.
pub fn wake_separation(
    following: AircraftClass,
    preceding: AircraftClass,
    kind: FlightKind,
    cfg: &SeparationConfig,
) -> Seconds {
    cfg.wake(following, preceding, kind)
}

/// Parameters of the traffic-scenario window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowParams {
    pub peak_fraction: f64,
    pub window_start: Seconds,
    pub window_seconds: Seconds,
}

impl Default for WindowParams {
    fn default() -> Self {
        Self {
            peak_fraction: 0.8,
            window_start: 0,
            window_seconds: 600,
        }
    }
}

/// A validated sequencing problem. Construction checks referential
/// integrity and the planned fix/runway time linkage of every flight.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    airports: Vec<Airport>,
    fixes: Vec<HandoverFix>,
    flights: Vec<Flight>,
    separation: SeparationConfig,
    segment_times: SegmentTimeTable,
    window: WindowParams,
    /// Segment time of each flight, aligned with `flights`.
    segment: Vec<Seconds>,
    flight_index: HashMap<String, usize>,
}

impl Instance {
    pub fn new(
        airports: Vec<Airport>,
        fixes: Vec<HandoverFix>,
        flights: Vec<Flight>,
        separation: SeparationConfig,
        segment_times: SegmentTimeTable,
        window: WindowParams,
    ) -> Result<Self> {
        separation.validate()?;
        segment_times.validate()?;
        validate_window(&window)?;
        validate_airports(&airports)?;
        validate_fixes(&fixes)?;

        let mut flight_index = HashMap::with_capacity(flights.len());
        let mut segment = Vec::with_capacity(flights.len());
        for (i, f) in flights.iter().enumerate() {
            let path = format!("flights[{i}]");
            if flight_index.insert(f.id.clone(), i).is_some() {
                return Err(Error::invalid(format!("{path}.id"), format!("duplicate flight id `{}`", f.id)));
            }
            let airport = airports.iter().find(|a| a.id == f.airport_id).ok_or_else(|| {
                Error::invalid(
                    format!("{path}.airport_id"),
                    format!("flight `{}` references unknown airport `{}`", f.id, f.airport_id),
                )
            })?;
            if !airport.has_runway(&f.runway_id) {
                return Err(Error::invalid(
                    format!("{path}.runway_id"),
                    format!("flight `{}` references unknown runway `{}` at `{}`", f.id, f.runway_id, f.airport_id),
                ));
            }
            let fix = fixes.iter().find(|x| x.id == f.fix_id).ok_or_else(|| {
                Error::invalid(
                    format!("{path}.fix_id"),
                    format!("flight `{}` references unknown fix `{}`", f.id, f.fix_id),
                )
            })?;
            if fix.direction != f.kind {
                return Err(Error::invalid(
                    format!("{path}.fix_id"),
                    format!("flight `{}` uses fix `{}` of the wrong direction", f.id, f.fix_id),
                ));
            }
            if f.handover_altitude_slot == 0 || f.handover_altitude_slot > fix.altitude_slots {
                return Err(Error::invalid(
                    format!("{path}.handover_altitude_slot"),
                    format!("flight `{}` slot {} outside 1..={}", f.id, f.handover_altitude_slot, fix.altitude_slots),
                ));
            }
            if !(f.wingspan_m > 0.0) {
                return Err(Error::invalid(format!("{path}.wingspan_m"), "wingspan must be positive"));
            }
            if f.planned_fix_time < 0 || f.planned_runway_time < 0 {
                return Err(Error::invalid(format!("{path}"), "planned times must be non-negative"));
            }
            if matches!(f.vacate_time, Some(v) if v <= 0) {
                return Err(Error::invalid(format!("{path}.vacate_time"), "vacate time must be positive"));
            }
            let seg = segment_times.lookup(f).0;
            let linked = match f.kind {
                FlightKind::Arrival => f.planned_fix_time + seg == f.planned_runway_time,
                FlightKind::Departure => f.planned_runway_time + seg == f.planned_fix_time,
            };
            if !linked {
                return Err(Error::invalid(
                    format!("{path}"),
                    format!(
                        "flight `{}` planned fix time {} and runway time {} do not differ by the {} s segment time",
                        f.id, f.planned_fix_time, f.planned_runway_time, seg
                    ),
                ));
            }
            segment.push(seg);
        }

        Ok(Self {
            airports,
            fixes,
            flights,
            separation,
            segment_times,
            window,
            segment,
            flight_index,
        })
    }

    pub fn airports(&self) -> &[Airport] {
        &self.airports
    }

    pub fn fixes(&self) -> &[HandoverFix] {
        &self.fixes
    }

    pub fn flights(&self) -> &[Flight] {
        &self.flights
    }

    pub fn separation(&self) -> &SeparationConfig {
        &self.separation
    }

    pub fn segment_times(&self) -> &SegmentTimeTable {
        &self.segment_times
    }

    pub fn window(&self) -> &WindowParams {
        &self.window
    }

    pub fn airport(&self, id: &str) -> Option<&Airport> {
        self.airports.iter().find(|a| a.id == id)
    }

    pub fn fix(&self, id: &str) -> Option<&HandoverFix> {
        self.fixes.iter().find(|f| f.id == id)
    }

    pub fn flight(&self, id: &str) -> Option<&Flight> {
        self.flight_index.get(id).map(|&i| &self.flights[i])
    }

    pub fn flight_position(&self, id: &str) -> Option<usize> {
        self.flight_index.get(id).copied()
    }

    /// Approach time (arrivals) or climb time (departures) of flight `i`.
    pub fn segment_time(&self, i: usize) -> Seconds {
        self.segment[i]
    }

    pub fn arrivals(&self) -> impl Iterator<Item = &Flight> {
        self.flights.iter().filter(|f| f.is_arrival())
    }

    pub fn departures(&self) -> impl Iterator<Item = &Flight> {
        self.flights.iter().filter(|f| !f.is_arrival())
    }

    /// Flights whose segment time came from the table's default entry.
    pub fn fallback_warnings(&self) -> Vec<String> {
        self.flights
            .iter()
            .filter(|f| self.segment_times.lookup(f).1)
            .map(|f| {
                format!(
                    "flight `{}` uses the default segment time ({} s): no entry for ({}, {}, {}, {})",
                    f.id, self.segment_times.default_seconds, f.airport_id, f.fix_id, f.runway_id, f.class
                )
            })
            .collect()
    }

    /// Replaces handover altitude slots; `slots` is aligned with `flights()`.
    pub(crate) fn with_altitude_slots(&self, slots: &[u8]) -> Instance {
        let mut out = self.clone();
        for (f, &s) in out.flights.iter_mut().zip(slots) {
            f.handover_altitude_slot = s;
        }
        out
    }

    pub fn into_parts(
        self,
    ) -> (
        Vec<Airport>,
        Vec<HandoverFix>,
        Vec<Flight>,
        SeparationConfig,
        SegmentTimeTable,
        WindowParams,
    ) {
        (
            self.airports,
            self.fixes,
            self.flights,
            self.separation,
            self.segment_times,
            self.window,
        )
    }
}

fn validate_window(w: &WindowParams) -> Result<()> {
    if !(w.peak_fraction > 0.0 && w.peak_fraction.is_finite()) {
        return Err(Error::invalid("peak_fraction", "must be a positive ratio"));
    }
    if w.window_seconds <= 0 {
        return Err(Error::invalid("window_seconds", "must be positive"));
    }
    if w.window_start < 0 {
        return Err(Error::invalid("window_start", "must be non-negative"));
    }
    Ok(())
}

fn validate_airports(airports: &[Airport]) -> Result<()> {
    let mut ids = HashSet::new();
    for (i, a) in airports.iter().enumerate() {
        let path = format!("airports[{i}]");
        if !ids.insert(a.id.as_str()) {
            return Err(Error::invalid(format!("{path}.id"), format!("duplicate airport id `{}`", a.id)));
        }
        let mut runways = HashSet::new();
        for rw in &a.runways {
            if !runways.insert(rw.as_str()) {
                return Err(Error::invalid(format!("{path}.runways"), format!("duplicate runway `{rw}`")));
            }
        }
        let mut paired = HashSet::new();
        for (p, (x, y)) in a.close_pairs.iter().enumerate() {
            let ppath = format!("{path}.close_pairs[{p}]");
            for rw in [x, y] {
                if !runways.contains(rw.as_str()) {
                    return Err(Error::invalid(ppath, format!("runway `{rw}` is not a runway of `{}`", a.id)));
                }
                if !paired.insert(rw.as_str()) {
                    return Err(Error::invalid(ppath, format!("runway `{rw}` appears in more than one close pair")));
                }
            }
            if x == y {
                return Err(Error::invalid(ppath, "a runway cannot pair with itself"));
            }
        }
        if a.hourly_capacity_arr == 0 || a.hourly_capacity_dep == 0 {
            return Err(Error::invalid(format!("{path}"), "hourly capacities must be positive"));
        }
    }
    Ok(())
}

fn validate_fixes(fixes: &[HandoverFix]) -> Result<()> {
    let mut ids = HashSet::new();
    for (i, x) in fixes.iter().enumerate() {
        if !ids.insert(x.id.as_str()) {
            return Err(Error::invalid(format!("fixes[{i}].id"), format!("duplicate fix id `{}`", x.id)));
        }
        if !(1..=2).contains(&x.altitude_slots) {
            return Err(Error::invalid(format!("fixes[{i}].altitude_slots"), "must be 1 or 2"));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlightTimes {
    pub fix_time: Seconds,
    pub runway_time: Seconds,
}

/// Optimized fix-crossing and runway times keyed by flight id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schedule {
    times: BTreeMap<String, FlightTimes>,
}

impl Schedule {
    pub fn new() -> Self {
        Self::default()
    }

    /// The schedule that flies every flight exactly as planned.
    pub fn planned(instance: &Instance) -> Self {
        instance
            .flights()
            .iter()
            .map(|f| {
                (
                    f.id.clone(),
                    FlightTimes {
                        fix_time: f.planned_fix_time,
                        runway_time: f.planned_runway_time,
                    },
                )
            })
            .collect()
    }

    pub fn insert(&mut self, flight: impl Into<String>, times: FlightTimes) -> Option<FlightTimes> {
        self.times.insert(flight.into(), times)
    }

    pub fn get(&self, flight: &str) -> Option<&FlightTimes> {
        self.times.get(flight)
    }

    pub fn get_mut(&mut self, flight: &str) -> Option<&mut FlightTimes> {
        self.times.get_mut(flight)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &FlightTimes)> {
        self.times.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Errors unless the schedule covers exactly the instance's flights.
    pub fn ensure_covers(&self, instance: &Instance) -> Result<()> {
        for f in instance.flights() {
            if !self.times.contains_key(&f.id) {
                return Err(Error::MissingFlight(f.id.clone()));
            }
        }
        for id in self.times.keys() {
            if instance.flight(id).is_none() {
                return Err(Error::UnknownFlight(id.clone()));
            }
        }
        Ok(())
    }
}

impl FromIterator<(String, FlightTimes)> for Schedule {
    fn from_iter<I: IntoIterator<Item = (String, FlightTimes)>>(iter: I) -> Self {
        Self {
            times: iter.into_iter().collect(),
        }
    }
}
