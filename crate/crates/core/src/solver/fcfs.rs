use std::time::Instant;

use super::feasibility::CompiledModel;
use super::{schedule_from_genes, verify, SolveResult, SolverConfig, TracePoint};
use crate::domain::Instance;
use crate::error::Result;
use crate::objective::ObjectiveContext;
use crate::scenario::ScenarioState;

/// First-come-first-served baseline: flights in planned runway-time order,
/// each at the earliest time on or after plan that keeps every clause
/// satisfied against the flights already placed. Arrivals are never
/// advanced. Uses the model switches and time step of `config`.
pub fn fcfs_schedule(instance: &Instance, scenario: &ScenarioState, config: &SolverConfig) -> Result<SolveResult> {
    let started = Instant::now();
    let model_opts = config.model();
    let instance = model_opts.prepare(instance);
    let model = CompiledModel::new(&instance, model_opts.crsspf, config.time_step)?;
    let genes = model.greedy(&instance, &vec![None; model.len()])?;
    let schedule = schedule_from_genes(&instance, &model, &genes);
    verify(&instance, &schedule, &model_opts)?;

    let ctx = ObjectiveContext::new(&instance, scenario, &config.objective_options());
    let objective = ctx.evaluate(&instance, &schedule)?;
    Ok(SolveResult {
        algorithm: super::Algorithm::Fcfs,
        model: model_opts,
        schedule,
        objective,
        convergence: vec![TracePoint {
            co_iteration: 0,
            upper_best: objective.upper,
            lower_best: objective.lower,
        }],
        evaluations: 1,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{FlightSpec, InstanceBuilder, ZSPD};
    use crate::domain::{AircraftClass::*, Schedule};
    use crate::error::Error;

    fn peak() -> ScenarioState {
        ScenarioState::forced(true)
    }

    #[test]
    fn wake_pushes_second_arrival() {
        let inst = InstanceBuilder::shanghai()
            .flight(FlightSpec::arrival("A1", ZSPD, "16L/34R", "AF1").class(Heavy).wingspan(60.0).at(2000))
            .flight(FlightSpec::arrival("A2", ZSPD, "16L/34R", "AF2").class(Medium).at(2030))
            .build()
            .unwrap();
        let r = fcfs_schedule(&inst, &peak(), &SolverConfig::default()).unwrap();
        assert_eq!(r.schedule.get("A1").unwrap().runway_time, 2000);
        assert_eq!(r.schedule.get("A2").unwrap().runway_time, 2060);
        assert_eq!(r.convergence.len(), 1);
    }

    #[test]
    fn single_flight_unchanged() {
        let inst = InstanceBuilder::shanghai()
            .flight(FlightSpec::departure("D1", ZSPD, "16R/34L", "DF1").at(2000))
            .build()
            .unwrap();
        let r = fcfs_schedule(&inst, &peak(), &SolverConfig::default()).unwrap();
        assert_eq!(r.schedule, Schedule::planned(&inst));
        assert_eq!((r.objective.upper, r.objective.lower), (0.0, 0.0));
    }

    #[test]
    fn departure_handover_spacing() {
        // Different airports, same single-slot fix: only the handover clause binds.
        let inst = InstanceBuilder::shanghai()
            .flight(FlightSpec::departure("D1", ZSPD, "16R/34L", "DF2").at(2000))
            .flight(FlightSpec::departure("D2", crate::builder::ZSSS, "18R/36L", "DF2").at(2110))
            .build()
            .unwrap();
        let f1 = inst.flight("D1").unwrap().planned_fix_time;
        let f2 = inst.flight("D2").unwrap().planned_fix_time;
        assert_eq!(f2 - f1, 50, "fixture premise");
        let r = fcfs_schedule(&inst, &peak(), &SolverConfig::default()).unwrap();
        let x1 = r.schedule.get("D1").unwrap().fix_time;
        let x2 = r.schedule.get("D2").unwrap().fix_time;
        assert_eq!(x1, f1);
        assert_eq!(x2, f1 + 135);
        assert!(r.violations(&inst).unwrap().is_empty());
    }

    #[test]
    fn over_constrained_instance_is_rejected() {
        let mut b = InstanceBuilder::shanghai();
        for i in 0..8 {
            b = b.flight(FlightSpec::arrival(&format!("A{i}"), ZSPD, "16L/34R", "AF1").class(Light).max_position_shift(0).at(2000));
        }
        let inst = b.build().unwrap();
        match fcfs_schedule(&inst, &peak(), &SolverConfig::default()) {
            Err(Error::Infeasible { flight }) => assert_eq!(flight, "A1"),
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }
}
