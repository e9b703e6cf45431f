//! Schedulers: the FCFS baseline, an exhaustive grid oracle for tiny
//! instances, and the bi-level co-evolutionary GA family.

mod bilevel;
mod fcfs;
pub(crate) mod feasibility;
mod oracle;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constraints::{check_schedule_with, CheckOptions};
use crate::domain::{Instance, Schedule, Seconds};
use crate::error::{Error, Result};
use crate::objective::{ObjectiveOptions, ObjectiveValue};
use crate::scenario::{assign_handover_altitudes, AltitudeMode, ScenarioState};

pub use bilevel::bilevel_solve;
pub use fcfs::fcfs_schedule;
pub use oracle::{brute_force_oracle, ORACLE_MAX_FLIGHTS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Fcfs,
    Oracle,
    BiGa,
    BiEga,
    BiSega,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Fcfs,
        Algorithm::Oracle,
        Algorithm::BiGa,
        Algorithm::BiEga,
        Algorithm::BiSega,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Fcfs => "fcfs",
            Algorithm::Oracle => "oracle",
            Algorithm::BiGa => "bi-ga",
            Algorithm::BiEga => "bi-ega",
            Algorithm::BiSega => "bi-sega",
        }
    }

    pub fn is_genetic(self) -> bool {
        matches!(self, Algorithm::BiGa | Algorithm::BiEga | Algorithm::BiSega)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }
}

/// The model switches that the ablation study toggles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelOptions {
    pub crsspf: bool,
    pub saha_mode: AltitudeMode,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            crsspf: true,
            saha_mode: AltitudeMode::Staggered,
        }
    }
}

impl ModelOptions {
    pub fn check_options(&self) -> CheckOptions {
        CheckOptions { crsspf: self.crsspf }
    }

    /// Applies the altitude-assignment mode; schedules produced under these
    /// options are checked against the returned instance.
    pub fn prepare(&self, instance: &Instance) -> Instance {
        assign_handover_altitudes(instance, self.saha_mode)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub population_size: usize,
    /// Generations per level per co-iteration.
    pub level_generations: usize,
    pub co_iterations: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    /// Fraction of the population kept as the elite pool (bi-SEGA).
    pub elite_fraction: f64,
    pub rng_seed: u64,
    pub repair_retry_cap: usize,
    pub stall_co_iterations: usize,
    pub enable_crsspf: bool,
    pub saha_mode: AltitudeMode,
    /// Resolution of decision times; genes live on `planned + k * step`.
    pub time_step: Seconds,
    /// Grid of the exhaustive oracle when run through [`solve`].
    pub oracle_grid: Seconds,
    pub clamp_arrival_advance: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::BiEga,
            population_size: 50,
            level_generations: 20,
            co_iterations: 30,
            crossover_prob: 0.8,
            mutation_prob: 0.1,
            elite_fraction: 0.1,
            rng_seed: 0,
            repair_retry_cap: 100,
            stall_co_iterations: 5,
            enable_crsspf: true,
            saha_mode: AltitudeMode::Staggered,
            time_step: 1,
            oracle_grid: 30,
            clamp_arrival_advance: false,
        }
    }
}

impl SolverConfig {
    pub fn with_algorithm(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            ..Self::default()
        }
    }

    pub fn model(&self) -> ModelOptions {
        ModelOptions {
            crsspf: self.enable_crsspf,
            saha_mode: self.saha_mode,
        }
    }

    pub fn objective_options(&self) -> ObjectiveOptions {
        ObjectiveOptions {
            clamp_arrival_advance: self.clamp_arrival_advance,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("crossover_prob", self.crossover_prob),
            ("mutation_prob", self.mutation_prob),
            ("elite_fraction", self.elite_fraction),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        for (name, c) in [
            ("population_size", self.population_size),
            ("level_generations", self.level_generations),
            ("co_iterations", self.co_iterations),
            ("repair_retry_cap", self.repair_retry_cap),
            ("stall_co_iterations", self.stall_co_iterations),
        ] {
            if c == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        if self.time_step <= 0 || self.oracle_grid <= 0 {
            return Err(Error::Config("time_step and oracle_grid must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub co_iteration: usize,
    pub upper_best: f64,
    pub lower_best: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub algorithm: Algorithm,
    pub model: ModelOptions,
    pub schedule: Schedule,
    pub objective: ObjectiveValue,
    pub convergence: Vec<TracePoint>,
    pub evaluations: u64,
    pub wall_time: f64,
}

impl SolveResult {
    /// Constraint report of the schedule under the model it was solved with,
    /// i.e. after the altitude-assignment mode is applied to `instance`.
    pub fn violations(&self, instance: &Instance) -> Result<Vec<crate::constraints::Violation>> {
        check_schedule_with(&self.model.prepare(instance), &self.schedule, &self.model.check_options())
    }
}

/// Runs the configured algorithm. The oracle searches the grid
/// `config.oracle_grid`; the other algorithms use `config.time_step`.
pub fn solve(instance: &Instance, scenario: &ScenarioState, config: &SolverConfig) -> Result<SolveResult> {
    match config.algorithm {
        Algorithm::Fcfs => fcfs_schedule(instance, scenario, config),
        Algorithm::Oracle => brute_force_oracle(instance, scenario, config, config.oracle_grid),
        Algorithm::BiGa | Algorithm::BiEga | Algorithm::BiSega => bilevel_solve(instance, scenario, config),
    }
}

/// Builds the schedule implied by decision times, one per flight.
pub(crate) fn schedule_from_genes(instance: &Instance, model: &feasibility::CompiledModel, genes: &[Seconds]) -> Schedule {
    instance
        .flights()
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let (runway_time, fix_time) = model.events(i, genes[i]);
            (
                f.id.clone(),
                crate::domain::FlightTimes {
                    fix_time,
                    runway_time,
                },
            )
        })
        .collect()
}

/// Final gate on every solver output: the constraint engine must report no
/// violations.
pub(crate) fn verify(instance: &Instance, schedule: &Schedule, model: &ModelOptions) -> Result<()> {
    let violations = check_schedule_with(instance, schedule, &model.check_options())?;
    if violations.is_empty() {
        Ok(())
    } else {

        Err(Error::Internal(violations.len()))
    }
}
