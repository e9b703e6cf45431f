//! JSON instance and result documents, CSV convergence traces, and the
//! synthetic instance generator.

mod generate;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constraints::Violation;
use crate::domain::{Airport, Flight, FlightTimes, HandoverFix, Instance, Schedule, Seconds, SeparationConfig, WindowParams};
use crate::error::{Error, Result};
use crate::flight_time::SegmentTimeTable;
use crate::objective::ObjectiveValue;
use crate::scenario::ScenarioState;
use crate::solver::{Algorithm, ModelOptions, SolveResult, TracePoint};

pub use generate::{generate_instance, generate_micro_instance, scenario_counts, AirportCounts, Template};

pub const FORMAT_VERSION: u32 = 1;

/// On-disk form of an [`Instance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub version: u32,
    pub airports: Vec<Airport>,
    pub fixes: Vec<HandoverFix>,
    pub separation: SeparationConfig,
    pub segment_times: SegmentTimeTable,
    pub peak_fraction: f64,
    pub window_start: Seconds,
    pub window_seconds: Seconds,
    pub flights: Vec<Flight>,
}

impl InstanceDocument {
    pub fn from_instance(instance: &Instance) -> Self {
        let (airports, fixes, flights, separation, segment_times, window) = instance.clone().into_parts();
        Self {
            version: FORMAT_VERSION,
            airports,
            fixes,
            separation,
            segment_times,
            peak_fraction: window.peak_fraction,
            window_start: window.window_start,
            window_seconds: window.window_seconds,
            flights,
        }
    }

    pub fn into_instance(self) -> Result<Instance> {
        if self.version != FORMAT_VERSION {
            return Err(Error::invalid(
                "version",
                format!("unsupported version {}, expected {FORMAT_VERSION}", self.version),
            ));
        }
        Instance::new(
            self.airports,
            self.fixes,
            self.flights,
            self.separation,
            self.segment_times,
            WindowParams {
                peak_fraction: self.peak_fraction,
                window_start: self.window_start,
                window_seconds: self.window_seconds,
            },
        )
    }
}

#[derive(Debug, Clone)]
pub struct ParsedInstance {
    pub instance: Instance,
    /// Flights whose segment time fell back to the table default.
    pub warnings: Vec<String>,
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::invalid(path, e.into_inner().to_string())
    })
}

pub fn parse_instance(text: &str) -> Result<ParsedInstance> {
    let doc: InstanceDocument = from_json(text)?;
    let instance = doc.into_instance()?;
    let warnings = instance.fallback_warnings();
    Ok(ParsedInstance { instance, warnings })
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<ParsedInstance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn write_instance(instance: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&InstanceDocument::from_instance(instance)).expect("instance serializes");
    s.push('\n');
    s
}

pub fn save_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_instance(instance))?;
    Ok(())
}

const SHANGHAI_FIXTURE: &str = include_str!("../../fixtures/shanghai.json");

/// The bundled two-airport network with 20 flights in an all-peak window.
pub fn shanghai_fixture() -> Instance {
    parse_instance(SHANGHAI_FIXTURE).expect("bundled fixture is valid").instance
}

/// On-disk form of a solver result. Wall time is deliberately absent so
/// that identical runs produce identical files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub version: u32,
    pub algorithm: Algorithm,
    pub model: ModelOptions,
    pub scenario: ScenarioState,
    pub objective: ObjectiveValue,
    pub evaluations: u64,
    pub co_iterations: usize,
    pub violations: Vec<Violation>,
    pub schedule: BTreeMap<String, FlightTimes>,
}

impl ResultDocument {
    /// Builds the document, re-checking the schedule with the constraint
    /// engine under the result's model.
    pub fn new(result: &SolveResult, instance: &Instance, scenario: &ScenarioState) -> Result<Self> {
        Ok(Self {
            version: FORMAT_VERSION,
            algorithm: result.algorithm,
            model: result.model,
            scenario: scenario.clone(),
            objective: result.objective,
            evaluations: result.evaluations,
            co_iterations: result.convergence.len(),
            violations: result.violations(instance)?,
            schedule: result.schedule.iter().map(|(id, t)| (id.to_string(), *t)).collect(),
        })
    }

    pub fn schedule(&self) -> Schedule {
        self.schedule.iter().map(|(id, t)| (id.clone(), *t)).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result serializes");
        s.push('\n');
        s
    }
}

pub fn parse_result(text: &str) -> Result<ResultDocument> {
    from_json(text)
}

/// Writes the result document and, when a sink is given, the trace.
pub fn write_result(
    result: &SolveResult,
    instance: &Instance,
    scenario: &ScenarioState,
    out: &mut impl Write,
    trace: Option<&mut dyn Write>,
) -> Result<()> {
    out.write_all(ResultDocument::new(result, instance, scenario)?.to_json().as_bytes())?;
    if let Some(t) = trace {
        write_trace(&result.convergence, t)?;
    }
    Ok(())
}

/// CSV with header `co_iteration,upper_best,lower_best`.
pub fn write_trace(trace: &[TracePoint], out: &mut dyn Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in trace {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

pub fn parse_trace(text: &str) -> Result<Vec<TracePoint>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// A schedule to validate: a result document, or any JSON object with a
/// `schedule` map. The model, when present, selects the altitude mode and
/// clause set used for checking.
#[derive(Debug, Clone, Deserialize)]
pub struct ScheduleDocument {
    pub schedule: BTreeMap<String, FlightTimes>,
    #[serde(default)]
    pub model: Option<ModelOptions>,
}

pub fn parse_schedule(text: &str) -> Result<ScheduleDocument> {
    from_json(text)
}

impl ScheduleDocument {
    pub fn schedule(&self) -> Schedule {
        self.schedule.iter().map(|(id, t)| (id.clone(), *t)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{FlightSpec, InstanceBuilder, ZSPD, ZSSS};
    use crate::scenario::{classify_scenario, compute_thresholds};
    use crate::solver::{fcfs_schedule, SolverConfig};

    fn sample() -> Instance {
        InstanceBuilder::shanghai()
            .flight(FlightSpec::arrival("A1", ZSPD, "16L/34R", "AF1").at(2000))
            .flight(FlightSpec::departure("D1", ZSSS, "18R/36L", "DF3").at(2050).vacate_time(50))
            .build()
            .unwrap()
    }

    #[test]
    fn bundled_fixture_shape() {
        let inst = shanghai_fixture();
        assert_eq!(inst.airports().len(), 2);
        assert_eq!(inst.airports().iter().map(|a| a.runways.len()).sum::<usize>(), 6);
        assert_eq!(inst.airports().iter().map(|a| a.close_pairs.len()).sum::<usize>(), 3);
        assert_eq!(inst.fixes().len(), 15);
        assert_eq!(write_instance(&inst), SHANGHAI_FIXTURE);
    }

    #[test]
    fn instance_round_trip() {
        let inst = sample();
        let text = write_instance(&inst);
        let back = parse_instance(&text).unwrap();
        assert_eq!(back.instance, inst);
        assert!(back.warnings.is_empty());
        assert_eq!(write_instance(&back.instance), text);
    }

    #[test]
    fn unknown_runway_names_flight() {
        let mut doc = InstanceDocument::from_instance(&sample());
        doc.flights[0].runway_id = "99X".into();
        let text = serde_json::to_string(&doc).unwrap();
        match parse_instance(&text) {
            Err(Error::Invalid { path, message }) => {
                assert_eq!(path, "flights[0].runway_id");
                assert!(message.contains("A1"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_error_carries_field_path() {
        let mut v: serde_json::Value = serde_json::from_str(&write_instance(&sample())).unwrap();
        v["flights"][1]["class"] = "Jumbo".into();
        match parse_instance(&v.to_string()) {
            Err(Error::Invalid { path, .. }) => assert_eq!(path, "flights[1].class"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_version_rejected() {
        let mut doc = InstanceDocument::from_instance(&sample());
        doc.version = 9;
        let r = parse_instance(&serde_json::to_string(&doc).unwrap());
        assert!(matches!(r, Err(Error::Invalid { path, .. }) if path == "version"));
    }

    #[test]
    fn empty_flight_list_is_valid() {
        let inst = InstanceBuilder::shanghai().build().unwrap();
        let parsed = parse_instance(&write_instance(&inst)).unwrap();
        assert!(parsed.instance.flights().is_empty());
    }

    #[test]
    fn fallback_segment_time_warns() {
        let mut doc = InstanceDocument::from_instance(&sample());
        doc.segment_times = SegmentTimeTable::new(600);
        doc.flights[0].planned_fix_time = doc.flights[0].planned_runway_time - 600;
        doc.flights[1].planned_fix_time = doc.flights[1].planned_runway_time + 600;
        let parsed = parse_instance(&serde_json::to_string(&doc).unwrap()).unwrap();
        assert_eq!(parsed.warnings.len(), 2);
    }

    #[test]
    fn result_and_trace_round_trip() {
        let inst = sample();
        let sc = classify_scenario(&inst, &compute_thresholds(&inst));
        let r = fcfs_schedule(&inst, &sc, &SolverConfig::default()).unwrap();
        let (mut out, mut trace) = (Vec::new(), Vec::new());
        write_result(&r, &inst, &sc, &mut out, Some(&mut trace)).unwrap();
        let doc = parse_result(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(doc.schedule(), r.schedule);
        assert!(doc.violations.is_empty());
        let sd = parse_schedule(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(sd.model, Some(r.model));

        let text = String::from_utf8(trace).unwrap();
        assert!(text.starts_with("co_iteration,upper_best,lower_best\n"));
        assert_eq!(parse_trace(&text).unwrap(), r.convergence);
        assert_eq!(text.lines().count(), 2);
    }
}
