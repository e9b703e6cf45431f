//! Programmatic instance construction and the Shanghai-like two-airport
//! template used by the generator, the bundled fixture and the examples.

use crate::domain::{
    AircraftClass, Airport, Flight, FlightKind, HandoverFix, Instance, Seconds, SeparationConfig, WindowParams,
};
use crate::error::Result;
use crate::flight_time::{SegmentEntry, SegmentTimeTable};

pub const ZSSS: &str = "ZSSS";
pub const ZSPD: &str = "ZSPD";

/// Runway roles of the template airports: (airport, arrival runways,
/// departure runways).
pub const SHANGHAI_RUNWAY_ROLES: [(&str, &[&str], &[&str]); 2] = [
    (ZSSS, &["18L/36R"], &["18R/36L"]),
    (ZSPD, &["16L/34R", "17R/35L"], &["16R/34L", "17L/35R"]),
];

pub const SHANGHAI_ARRIVAL_FIXES: [(&str, u8); 5] = [("AF1", 2), ("AF2", 2), ("AF3", 2), ("AF4", 1), ("AF5", 2)];

pub const SHANGHAI_DEPARTURE_FIXES: [(&str, u8); 10] = [
    ("DF1", 2),
    ("DF2", 1),
    ("DF3", 2),
    ("DF4", 2),
    ("DF5", 1),
    ("DF6", 2),
    ("DF7", 2),
    ("DF8", 1),
    ("DF9", 2),
    ("DF10", 2),
];

/// Classification window of template instances. It starts late enough that
/// fix times and position-shift windows stay non-negative.
pub const SHANGHAI_WINDOW: WindowParams = WindowParams {
    peak_fraction: 0.8,
    window_start: 1800,
    window_seconds: 600,
};

pub fn shanghai_airports() -> Vec<Airport> {
    let pair = |a: &str, b: &str| (a.to_string(), b.to_string());
    vec![
        Airport {
            id: ZSSS.into(),
            runways: vec!["18L/36R".into(), "18R/36L".into()],
            close_pairs: vec![pair("18L/36R", "18R/36L")],
            has_end_around_taxiway: true,
            hourly_capacity_arr: 25,
            hourly_capacity_dep: 25,
        },
        Airport {
            id: ZSPD.into(),
            runways: vec!["16L/34R".into(), "16R/34L".into(), "17L/35R".into(), "17R/35L".into()],
            close_pairs: vec![pair("16L/34R", "16R/34L"), pair("17R/35L", "17L/35R")],
            has_end_around_taxiway: false,
            hourly_capacity_arr: 46,
            hourly_capacity_dep: 46,
        },
    ]
}

pub fn shanghai_fixes() -> Vec<HandoverFix> {
    let arr = SHANGHAI_ARRIVAL_FIXES.iter().map(|&(id, slots)| HandoverFix {
        id: id.into(),
        direction: FlightKind::Arrival,
        altitude_slots: slots,
    });
    let dep = SHANGHAI_DEPARTURE_FIXES.iter().map(|&(id, slots)| HandoverFix {
        id: id.into(),
        direction: FlightKind::Departure,
        altitude_slots: slots,
    });
    arr.chain(dep).collect()
}

/// Class-independent approach and climb times for every (airport, fix,
/// runway) combination of the template.
pub fn shanghai_segment_times() -> SegmentTimeTable {
    let mut t = SegmentTimeTable::new(900);
    for (a, (airport, arr_rw, dep_rw)) in SHANGHAI_RUNWAY_ROLES.iter().enumerate() {
        for (i, (fix, _)) in SHANGHAI_ARRIVAL_FIXES.iter().enumerate() {
            for (r, rw) in arr_rw.iter().enumerate() {
                t.insert(SegmentEntry {
                    airport: airport.to_string(),
                    fix: fix.to_string(),
                    runway: rw.to_string(),
                    class: None,
                    seconds: 780 + 60 * i as Seconds + 90 * a as Seconds + 30 * r as Seconds,
                });
            }
        }
        for (i, (fix, _)) in SHANGHAI_DEPARTURE_FIXES.iter().enumerate() {
            for (r, rw) in dep_rw.iter().enumerate() {
                t.insert(SegmentEntry {
                    airport: airport.to_string(),
                    fix: fix.to_string(),
                    runway: rw.to_string(),
                    class: None,
                    seconds: 420 + 30 * i as Seconds + 60 * a as Seconds + 20 * r as Seconds,
                });
            }
        }
    }
    t
}

/// One flight to be added by [`InstanceBuilder`]; the planned fix time is
/// derived from the runway time through the segment table.
#[derive(Debug, Clone)]
pub struct FlightSpec {
    id: String,
    kind: FlightKind,
    airport: String,
    runway: String,
    fix: String,
    class: AircraftClass,
    wingspan_m: f64,
    runway_time: Seconds,
    max_position_shift: u32,
    slot: u8,
    vacate_time: Option<Seconds>,
}

impl FlightSpec {
    fn new(kind: FlightKind, id: &str, airport: &str, runway: &str, fix: &str) -> Self {
        Self {
            id: id.into(),
            kind,
            airport: airport.into(),
            runway: runway.into(),
            fix: fix.into(),
            class: AircraftClass::Medium,
            wingspan_m: 34.1,
            runway_time: 0,
            max_position_shift: 2,
            slot: 1,
            vacate_time: None,
        }
    }

    pub fn arrival(id: &str, airport: &str, runway: &str, fix: &str) -> Self {
        Self::new(FlightKind::Arrival, id, airport, runway, fix)
    }

    pub fn departure(id: &str, airport: &str, runway: &str, fix: &str) -> Self {
        Self::new(FlightKind::Departure, id, airport, runway, fix)
    }

    pub fn class(mut self, class: AircraftClass) -> Self {
        self.class = class;
        self
    }

    pub fn wingspan(mut self, meters: f64) -> Self {
        self.wingspan_m = meters;
        self
    }

    /// Planned landing or take-off time.
    pub fn at(mut self, runway_time: Seconds) -> Self {
        self.runway_time = runway_time;
        self
    }

    pub fn max_position_shift(mut self, mps: u32) -> Self {
        self.max_position_shift = mps;
        self
    }

    pub fn slot(mut self, slot: u8) -> Self {
        self.slot = slot;
        self
    }

    pub fn vacate_time(mut self, seconds: Seconds) -> Self {
        self.vacate_time = Some(seconds);
        self
    }

    fn into_flight(self, table: &SegmentTimeTable) -> Flight {
        let mut f = Flight {
            id: self.id,
            kind: self.kind,
            airport_id: self.airport,
            runway_id: self.runway,
            fix_id: self.fix,
            class: self.class,
            wingspan_m: self.wingspan_m,
            planned_fix_time: 0,
            planned_runway_time: self.runway_time,
            handover_altitude_slot: self.slot,
            max_position_shift: self.max_position_shift,
            vacate_time: self.vacate_time,
        };
        let seg = table.lookup(&f).0;
        f.planned_fix_time = match f.kind {
            FlightKind::Arrival => self.runway_time - seg,
            FlightKind::Departure => self.runway_time + seg,
        };
        f
    }
}

#[derive(Debug, Clone)]
pub struct InstanceBuilder {
    airports: Vec<Airport>,
    fixes: Vec<HandoverFix>,
    flights: Vec<FlightSpec>,
    separation: SeparationConfig,
    segment_times: SegmentTimeTable,
    window: WindowParams,
}

impl InstanceBuilder {
    pub fn new() -> Self {
        Self {
            airports: Vec::new(),
            fixes: Vec::new(),
            flights: Vec::new(),
            separation: SeparationConfig::default(),
            segment_times: SegmentTimeTable::new(600),
            window: WindowParams::default(),
        }
    }

    /// Two airports, six runways, three close pairs, five arrival and ten
    /// departure fixes.
    pub fn shanghai() -> Self {
        Self {
            airports: shanghai_airports(),
            fixes: shanghai_fixes(),
            flights: Vec::new(),
            separation: SeparationConfig::default(),
            segment_times: shanghai_segment_times(),
            window: SHANGHAI_WINDOW,
        }
    }

    pub fn airport(mut self, airport: Airport) -> Self {
        self.airports.push(airport);
        self
    }

    pub fn fix(mut self, fix: HandoverFix) -> Self {
        self.fixes.push(fix);
        self
    }

    pub fn flight(mut self, spec: FlightSpec) -> Self {
        self.flights.push(spec);
        self
    }

    pub fn separation(mut self, cfg: SeparationConfig) -> Self {
        self.separation = cfg;
        self
    }

    pub fn segment_times(mut self, table: SegmentTimeTable) -> Self {
        self.segment_times = table;
        self
    }

    pub fn window(mut self, window: WindowParams) -> Self {
        self.window = window;
        self
    }

    pub fn build(self) -> Result<Instance> {
        let table = self.segment_times;
        let flights = self.flights.into_iter().map(|s| s.into_flight(&table)).collect();
        Instance::new(self.airports, self.fixes, flights, self.separation, table, self.window)
    }
}

impl Default for InstanceBuilder {
    fn default() -> Self {
        Self::new()
    }
}
