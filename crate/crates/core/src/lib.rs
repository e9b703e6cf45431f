//! Bi-level arrival/departure sequencing for multi-airport terminal areas.
//!
//! An [`Instance`] holds airports, handover fixes, flights and separation
//! rules. [`scenario`] classifies the traffic window as peak or non-peak,
//! which selects the objectives in [`objective`]. [`constraints`] checks any
//! schedule, and [`solver`] produces schedules with FCFS, an exhaustive
//! oracle for tiny instances, or the bi-level GA family.

pub mod builder;
pub mod constraints;
pub mod domain;
pub mod error;
pub mod experiment;
pub mod flight_time;
pub mod io;
pub mod objective;
pub mod scenario;
pub mod solver;

pub use domain::{AircraftClass, Airport, Flight, FlightKind, FlightTimes, HandoverFix, Instance, Schedule, Seconds, SeparationConfig};
pub use error::{Error, Result};
pub use scenario::{ScenarioIndex, ScenarioState};
pub use solver::{solve, Algorithm, SolveResult, SolverConfig};
