//! Deterministic segment-time model linking fix-crossing and runway times.
//!
//! Approach and climb times are table constants keyed by
//! `(airport, fix, runway, class)`. An entry without a class applies to every
//! class that has no exact entry; anything else falls back to
//! `default_seconds`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{AircraftClass, Flight, FlightKind, Seconds};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentEntry {
    pub airport: String,
    pub fix: String,
    pub runway: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<AircraftClass>,
    pub seconds: Seconds,
}

type Key = (String, String, String, Option<AircraftClass>);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "TableRepr", into = "TableRepr")]
pub struct SegmentTimeTable {
    entries: BTreeMap<Key, Seconds>,
    pub default_seconds: Seconds,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    default_seconds: Seconds,
    #[serde(default)]
    entries: Vec<SegmentEntry>,
}

impl From<TableRepr> for SegmentTimeTable {
    fn from(r: TableRepr) -> Self {
        let mut t = SegmentTimeTable::new(r.default_seconds);
        for e in r.entries {
            t.insert(e);
        }
        t
    }
}

impl From<SegmentTimeTable> for TableRepr {
    fn from(t: SegmentTimeTable) -> Self {
        TableRepr {
            default_seconds: t.default_seconds,
            entries: t.entries().collect(),
        }
    }
}

impl SegmentTimeTable {
    pub fn new(default_seconds: Seconds) -> Self {
        Self {
            entries: BTreeMap::new(),
            default_seconds,
        }
    }

    pub fn insert(&mut self, e: SegmentEntry) {
        self.entries.insert((e.airport, e.fix, e.runway, e.class), e.seconds);
    }

    pub fn entries(&self) -> impl Iterator<Item = SegmentEntry> + '_ {
        self.entries.iter().map(|((airport, fix, runway, class), &seconds)| SegmentEntry {
            airport: airport.clone(),
            fix: fix.clone(),
            runway: runway.clone(),
            class: *class,
            seconds,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Segment time for a flight and whether the default was used.
    pub fn lookup(&self, flight: &Flight) -> (Seconds, bool) {
        let mut key = (
            flight.airport_id.clone(),
            flight.fix_id.clone(),
            flight.runway_id.clone(),
            Some(flight.class),
        );
        if let Some(&s) = self.entries.get(&key) {
            return (s, false);
        }
        key.3 = None;
        match self.entries.get(&key) {
            Some(&s) => (s, false),
            None => (self.default_seconds, true),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.default_seconds <= 0 {
            return Err(Error::invalid("segment_times.default_seconds", "must be positive"));
        }
        for (i, ((a, f, r, _), &s)) in self.entries.iter().enumerate() {
            if s <= 0 {
                return Err(Error::invalid(
                    format!("segment_times.entries[{i}]"),
                    format!("segment time for ({a}, {f}, {r}) must be positive"),
                ));
            }
        }
        Ok(())
    }
}

/// Simulated approach time from arrival fix to landing.
pub fn approach_time(flight: &Flight, table: &SegmentTimeTable) -> Result<Seconds> {
    if flight.kind != FlightKind::Arrival {
        return Err(Error::Contract(format!("approach time requested for departure `{}`", flight.id)));
    }
    Ok(table.lookup(flight).0)
}

/// Simulated climb time from take-off to departure fix.
pub fn climb_time(flight: &Flight, table: &SegmentTimeTable) -> Result<Seconds> {
    if flight.kind != FlightKind::Departure {
        return Err(Error::Contract(format!("climb time requested for arrival `{}`", flight.id)));
    }
    Ok(table.lookup(flight).0)
}

/// Runway time implied by a fix-crossing time: `fix + approach` for
/// arrivals, `fix - climb` for departures.
pub fn runway_time_from_fix(flight: &Flight, fix_time: Seconds, table: &SegmentTimeTable) -> Seconds {
    let seg = table.lookup(flight).0;
    match flight.kind {
        FlightKind::Arrival => fix_time + seg,
        FlightKind::Departure => fix_time - seg,
    }
}

/// Fix-crossing time implied by a runway time; inverse of
/// [`runway_time_from_fix`].
pub fn fix_time_from_runway(flight: &Flight, runway_time: Seconds, table: &SegmentTimeTable) -> Seconds {
    let seg = table.lookup(flight).0;
    match flight.kind {
        FlightKind::Arrival => runway_time - seg,
        FlightKind::Departure => runway_time + seg,
    }
}
