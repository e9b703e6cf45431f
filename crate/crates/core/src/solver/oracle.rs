//! Exhaustive search over grid-aligned decision times for tiny instances.
//!
//! Every grid point of every flight's position-shift window is enumerated by
//! depth-first search, arrivals first. Partial assignments are pruned with
//! the constraint engine's own pairwise verdicts and with objective bounds,
//! so the result is the lexicographic `(upper, lower)` optimum over the grid.
//! Enumerating times covers every queue ordering those times can realize.

use std::time::Instant;

use super::{verify, Algorithm, SolveResult, SolverConfig, TracePoint};
use crate::constraints::{pair_satisfied, CheckOptions};
use crate::domain::{Flight, FlightTimes, Instance, Schedule, Seconds};
use crate::error::{Error, Result};
use crate::objective::{ObjectiveContext, ObjectiveValue};
use crate::scenario::ScenarioState;

pub const ORACLE_MAX_FLIGHTS: usize = 6;

struct Search<'a> {
    instance: &'a Instance,
    ctx: ObjectiveContext,
    check: CheckOptions,
    clamp: bool,
    /// Flight indices in search order.
    order: Vec<usize>,
    n_arrivals: usize,
    domains: Vec<Vec<Seconds>>,
    times: Vec<FlightTimes>,
    /// Decision time per flight index.
    genes: Vec<Seconds>,
    best: Option<(f64, f64, Vec<Seconds>)>,
    leaves: u64,
}

fn grid(flight: &Flight, offset: Seconds, step: Seconds) -> Vec<Seconds> {
    let (lo, hi) = flight.position_shift_window(offset);
    let planned = flight.planned_decision_time();
    let first = planned - ((planned - lo) / step) * step;
    (0..).map(|k| first + k * step).take_while(|&t| t <= hi).collect()
}

fn times_for(instance: &Instance, i: usize, gene: Seconds) -> FlightTimes {
    let f = &instance.flights()[i];
    let seg = instance.segment_time(i);
    if f.is_arrival() {
        FlightTimes {
            fix_time: gene,
            runway_time: gene + seg,
        }
    } else {
        FlightTimes {
            fix_time: gene + seg,
            runway_time: gene,
        }
    }
}

impl Search<'_> {
    fn arrival_gene_contribution(&self, i: usize, gene: Seconds) -> Seconds {
        let d = gene - self.instance.flights()[i].planned_fix_time;
        if self.clamp {
            d.max(0)
        } else {
            d
        }
    }

    /// Lower bounds on (upper, lower) given the first `depth` assignments.
    fn bounds(&self, depth: usize) -> (f64, f64) {
        let flights = self.instance.flights();
        let peak = self.ctx.is_peak();
        let upper = if depth >= self.n_arrivals {
            let fix: Vec<Seconds> = self.ctx.arrival_indices().iter().map(|&i| self.genes[i]).collect();
            let landing: Vec<Seconds> = self.ctx.arrival_indices().iter().map(|&i| self.times[i].runway_time).collect();
            self.ctx.upper(&fix, &landing)
        } else if peak {
            0.0
        } else {
            let mut s = 0;
            for (pos, &i) in self.order[..self.n_arrivals].iter().enumerate() {
                s += if pos < depth {
                    self.arrival_gene_contribution(i, self.genes[i])
                } else {
                    self.arrival_gene_contribution(i, self.domains[pos][0])
                };
            }
            s as f64
        };
        let placed_deps = self.order[self.n_arrivals..depth.max(self.n_arrivals)].iter();
        let lower = if peak {
            let takeoffs: Vec<Seconds> = placed_deps.map(|&i| self.genes[i]).collect();
            self.ctx.rot_span(&takeoffs) as f64
        } else {
            placed_deps.map(|&i| (self.genes[i] - flights[i].planned_runway_time) as f64).sum()
        };
        (upper, lower)
    }

    fn dominated(&self, bound: (f64, f64)) -> bool {
        match &self.best {
            None => false,
            Some((u, l, _)) => bound.0 > *u || (bound.0 == *u && bound.1 >= *l),
        }
    }

    fn dfs(&mut self, depth: usize) {
        if depth == self.order.len() {
            self.leaves += 1;
            let bound = self.bounds(depth);
            if !self.dominated(bound) {
                self.best = Some((bound.0, bound.1, self.genes.clone()));
            }
            return;
        }
        let i = self.order[depth];
        let flights = self.instance.flights();
        for v in 0..self.domains[depth].len() {
            let gene = self.domains[depth][v];
            self.genes[i] = gene;
            self.times[i] = times_for(self.instance, i, gene);
            let consistent = self.order[..depth].iter().all(|&j| {
                pair_satisfied(
                    self.instance,
                    &self.check,
                    (&flights[i], &self.times[i]),
                    (&flights[j], &self.times[j]),
                )
            });
            if !consistent {
                continue;
            }
            if self.dominated(self.bounds(depth + 1)) {
                continue;
            }
            self.dfs(depth + 1);
        }
    }
}

/// Exact optimum over the grid `planned + k * grid_seconds` inside each
/// flight's position-shift window. Model switches and objective options come
/// from `config`. Refuses instances with more than [`ORACLE_MAX_FLIGHTS`]
/// flights.
pub fn brute_force_oracle(
    instance: &Instance,
    scenario: &ScenarioState,
    config: &SolverConfig,
    grid_seconds: Seconds,
) -> Result<SolveResult> {
    let started = Instant::now();
    let n = instance.flights().len();
    if n > ORACLE_MAX_FLIGHTS {
        return Err(Error::TooLarge {
            flights: n,
            limit: ORACLE_MAX_FLIGHTS,
        });
    }
    if grid_seconds <= 0 {
        return Err(Error::Config("grid step must be positive".into()));
    }
    let model = config.model();
    let instance = model.prepare(instance);
    let flights = instance.flights();
    let ctx = ObjectiveContext::new(&instance, scenario, &config.objective_options());

    let by_plan = |ids: &[usize]| {
        let mut v = ids.to_vec();
        v.sort_by(|&a, &b| (flights[a].planned_runway_time, &flights[a].id).cmp(&(flights[b].planned_runway_time, &flights[b].id)));
        v
    };
    let mut order = by_plan(ctx.arrival_indices());
    let n_arrivals = order.len();
    order.extend(by_plan(ctx.departure_indices()));

    let offset = instance.separation().position_shift_offset;
    let domains = order.iter().map(|&i| grid(&flights[i], offset, grid_seconds)).collect();

    let mut search = Search {
        instance: &instance,
        ctx,
        check: model.check_options(),
        clamp: config.clamp_arrival_advance,
        order,
        n_arrivals,
        domains,
        times: (0..n).map(|i| times_for(&instance, i, flights[i].planned_decision_time())).collect(),
        genes: flights.iter().map(|f| f.planned_decision_time()).collect(),
        best: None,
        leaves: 0,
    };
    search.dfs(0);

    let Some((_, _, genes)) = search.best.take() else {
        return Err(Error::Infeasible {
            flight: flights.first().map(|f| f.id.clone()).unwrap_or_default(),
        });
    };
    let schedule: Schedule = (0..n)
        .map(|i| (flights[i].id.clone(), times_for(&instance, i, genes[i])))
        .collect();
    verify(&instance, &schedule, &model)?;
    let objective: ObjectiveValue = search.ctx.evaluate(&instance, &schedule)?;
    Ok(SolveResult {
        algorithm: Algorithm::Oracle,
        model,
        schedule,
        objective,
        convergence: vec![TracePoint {
            co_iteration: 0,
            upper_best: objective.upper,
            lower_best: objective.lower,
        }],
        evaluations: search.leaves,
        wall_time: started.elapsed().as_secs_f64(),
    })
}
