//! Traffic-scenario classification and handover-altitude assignment.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::domain::Instance;

/// Peak thresholds, in flights per classification window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeakThresholds {
    pub mas: u32,
    /// Per-airport thresholds in instance order.
    pub per_airport: Vec<(String, u32)>,
    pub window_seconds: i64,
}

impl PeakThresholds {
    pub fn airport(&self, id: &str) -> Option<u32> {
        self.per_airport.iter().find(|(a, _)| a == id).map(|&(_, t)| t)
    }
}

fn window_threshold(hourly: f64, window_seconds: i64) -> u32 {
    let v = (hourly * window_seconds as f64 / 3600.0).round();
    (v as u32).max(1)
}

/// Per-airport threshold is `(arr + dep capacity) * peak_fraction` per hour;
/// the system threshold uses the summed hourly figure. Both are scaled to the
/// window and rounded to the nearest integer.
pub fn compute_thresholds(instance: &Instance) -> PeakThresholds {
    let w = instance.window();
    let mut mas_hourly = 0.0;
    let per_airport = instance
        .airports()
        .iter()
        .map(|a| {
            let hourly = a.hourly_capacity() as f64 * w.peak_fraction;
            mas_hourly += hourly;
            (a.id.clone(), window_threshold(hourly, w.window_seconds))
        })
        .collect();
    PeakThresholds {
        mas: window_threshold(mas_hourly, w.window_seconds),
        per_airport,
        window_seconds: w.window_seconds,
    }
}

/// Row of the six-scenario table, or `Other` when the peak pattern matches
/// no row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioIndex {
    Row(u8),
    Other,
}

impl fmt::Display for ScenarioIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioIndex::Row(r) => write!(f, "{r}"),
            ScenarioIndex::Other => f.write_str("other"),
        }
    }
}

impl Serialize for ScenarioIndex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ScenarioIndex::Row(r) => s.serialize_u8(*r),
            ScenarioIndex::Other => s.serialize_str("other"),
        }
    }
}

impl<'de> Deserialize<'de> for ScenarioIndex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Row(u8),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Row(r) if (1..=6).contains(&r) => Ok(ScenarioIndex::Row(r)),
            Repr::Text(t) if t == "other" => Ok(ScenarioIndex::Other),
            _ => Err(serde::de::Error::custom("scenario index must be 1..=6 or \"other\"")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioState {
    /// Selects which objective term is active at both levels.
    pub mas_peak: bool,
    pub airport_peak: BTreeMap<String, bool>,
    pub scenario_index: ScenarioIndex,
}

impl ScenarioState {
    /// A state carrying only the system peak flag, for callers that want to
    /// force one objective regime.
    pub fn forced(mas_peak: bool) -> Self {
        Self {
            mas_peak,
            airport_peak: BTreeMap::new(),
            scenario_index: if mas_peak { ScenarioIndex::Other } else { ScenarioIndex::Row(6) },
        }
    }

    pub fn is_peak(&self) -> bool {
        self.mas_peak
    }
}

/// Flight counts inside the classification window, per airport in instance
/// order, counted on planned runway times.
pub fn window_counts(instance: &Instance) -> Vec<(String, u32)> {
    let w = instance.window();
    let (lo, hi) = (w.window_start, w.window_start + w.window_seconds);
    instance
        .airports()
        .iter()
        .map(|a| {
            let n = instance
                .flights()
                .iter()
                .filter(|f| f.airport_id == a.id && (lo..hi).contains(&f.planned_runway_time))
                .count() as u32;
            (a.id.clone(), n)
        })
        .collect()
}

pub fn classify_scenario(instance: &Instance, thresholds: &PeakThresholds) -> ScenarioState {
    let counts = window_counts(instance);
    let mas: u32 = counts.iter().map(|(_, n)| n).sum();
    classify_counts(mas, &counts, thresholds)
}

/// Peak flags are inclusive (`count >= threshold`). Airports without a
/// threshold are treated as non-peak.
pub fn classify_counts(mas_count: u32, airport_counts: &[(String, u32)], thresholds: &PeakThresholds) -> ScenarioState {
    let mas_peak = mas_count >= thresholds.mas;
    let flags: Vec<(String, bool)> = airport_counts
        .iter()
        .map(|(id, n)| (id.clone(), thresholds.airport(id).is_some_and(|t| *n >= t)))
        .collect();
    let scenario_index = table_row(mas_peak, &flags.iter().map(|&(_, p)| p).collect::<Vec<_>>());
    ScenarioState {
        mas_peak,
        airport_peak: flags.into_iter().collect(),
        scenario_index,
    }
}

fn table_row(mas: bool, airports: &[bool]) -> ScenarioIndex {
    let row = match (mas, airports) {
        (true, [true, false]) => 1,
        (true, [false, true]) => 2,
        (true, [true, true]) => 3,
        (false, [true, false]) => 4,
        (false, [false, true]) => 5,
        (false, [false, false]) => 6,
        (_, [_, _]) => return ScenarioIndex::Other,
        (true, a) if a.iter().all(|&p| p) => 3,
        (false, a) if a.iter().all(|&p| !p) => 6,
        _ => return ScenarioIndex::Other,
    };
    ScenarioIndex::Row(row)
}

/// How handover altitudes are distributed among flights sharing a fix.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AltitudeMode {
    /// Alternate slots between consecutive flights through the fix.
    #[default]
    Staggered,
    /// Bind each airport to one slot of the fix.
    FixedByAirport,
}

impl fmt::Display for AltitudeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AltitudeMode::Staggered => "staggered",
            AltitudeMode::FixedByAirport => "fixed-by-airport",
        })
    }
}

/// Returns a copy of the instance with handover altitude slots reassigned.
///
/// Staggered: per fix, flights ordered by planned fix time (then id) get
/// slots 1, 2, 1, 2, ... on two-slot fixes. Fixed-by-airport: airports using
/// the fix, sorted by id, are bound to slots round-robin, so more than two
/// airports reuse slots.
pub fn assign_handover_altitudes(instance: &Instance, mode: AltitudeMode) -> Instance {
    let flights = instance.flights();
    let mut slots = vec![1u8; flights.len()];
    for fix in instance.fixes() {
        let mut members: Vec<usize> = (0..flights.len()).filter(|&i| flights[i].fix_id == fix.id).collect();
        if fix.altitude_slots < 2 {
            continue;
        }
        match mode {
            AltitudeMode::Staggered => {
                members.sort_by(|&a, &b| {
                    let (fa, fb) = (&flights[a], &flights[b]);
                    fa.planned_fix_time.cmp(&fb.planned_fix_time).then_with(|| fa.id.cmp(&fb.id))
                });
                for (rank, &i) in members.iter().enumerate() {
                    slots[i] = (rank % fix.altitude_slots as usize) as u8 + 1;
                }
            }
            AltitudeMode::FixedByAirport => {
                let mut airports: Vec<&str> = members.iter().map(|&i| flights[i].airport_id.as_str()).collect();
                airports.sort_unstable();
                airports.dedup();
                for &i in &members {
                    let pos = airports.binary_search(&flights[i].airport_id.as_str()).unwrap_or(0);
                    slots[i] = (pos % fix.altitude_slots as usize) as u8 + 1;
                }
            }
        }
    }
    instance.with_altitude_slots(&slots)
}
