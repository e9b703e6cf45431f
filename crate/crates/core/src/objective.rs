//! Scenario-switched objectives of both levels.
//!
//! Upper level (arrivals): in peak the total landing-order shift
//! `sum |rank_opt - rank_planned|`, otherwise the total arrival-fix delay.
//! Lower level (departures): in peak the take-off span over all departures,
//! otherwise the total take-off delay.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::domain::{Instance, Schedule, Seconds};
use crate::error::{Error, Result};
use crate::scenario::ScenarioState;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectiveOptions {
    /// Count advanced arrivals as zero delay instead of negative delay.
    pub clamp_arrival_advance: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveComponents {
    pub arr_order_shift_total: Seconds,
    /// Sum of `opt - planned` arrival fix times; negative when arrivals are
    /// advanced and clamping is off.
    pub arr_delay_total_s: Seconds,
    pub dep_rot_span_s: Seconds,
    pub dep_delay_total_s: Seconds,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    pub upper: f64,
    pub lower: f64,
    pub components: ObjectiveComponents,
}

/// Precomputed per-instance data for repeated objective evaluation over
/// vectors of decision times.
#[derive(Debug, Clone)]
pub struct ObjectiveContext {
    peak: bool,
    clamp: bool,
    /// Flight indices of arrivals, in instance order.
    arrivals: Vec<usize>,
    arr_planned_fix: Vec<Seconds>,
    /// Landing queues as positions into `arrivals`, each sorted by flight id.
    queues: Vec<Vec<usize>>,
    planned_rank: Vec<usize>,
    departures: Vec<usize>,
    dep_planned: Vec<Seconds>,
}

impl ObjectiveContext {
    pub fn new(instance: &Instance, scenario: &ScenarioState, opts: &ObjectiveOptions) -> Self {
        let flights = instance.flights();
        let arrivals: Vec<usize> = (0..flights.len()).filter(|&i| flights[i].is_arrival()).collect();
        let departures: Vec<usize> = (0..flights.len()).filter(|&i| !flights[i].is_arrival()).collect();

        let mut by_queue: BTreeMap<(&str, &str), Vec<usize>> = BTreeMap::new();
        for (pos, &i) in arrivals.iter().enumerate() {
            by_queue
                .entry((&flights[i].airport_id, &flights[i].runway_id))
                .or_default()
                .push(pos);
        }
        let mut queues: Vec<Vec<usize>> = by_queue.into_values().collect();
        for q in &mut queues {
            q.sort_by(|&a, &b| flights[arrivals[a]].id.cmp(&flights[arrivals[b]].id));
        }

        let mut ctx = Self {
            peak: scenario.mas_peak,
            clamp: opts.clamp_arrival_advance,
            arr_planned_fix: arrivals.iter().map(|&i| flights[i].planned_fix_time).collect(),
            planned_rank: vec![0; arrivals.len()],
            dep_planned: departures.iter().map(|&i| flights[i].planned_runway_time).collect(),
            arrivals,
            queues,
            departures,
        };
        let planned_landing: Vec<Seconds> = ctx.arrivals.iter().map(|&i| flights[i].planned_runway_time).collect();
        ctx.planned_rank = ctx.ranks(&planned_landing);
        ctx
    }

    pub fn is_peak(&self) -> bool {
        self.peak
    }

    /// Flight indices of the arrivals, the order every arrival slice uses.
    pub fn arrival_indices(&self) -> &[usize] {
        &self.arrivals
    }

    /// Flight indices of the departures, the order every departure slice uses.
    pub fn departure_indices(&self) -> &[usize] {
        &self.departures
    }

    /// 1-based rank of each arrival within its runway queue, by landing time
    /// with ties broken by flight id.
    pub fn ranks(&self, landing: &[Seconds]) -> Vec<usize> {
        let mut out = vec![0; landing.len()];
        let mut buf = Vec::new();
        for q in &self.queues {
            buf.clear();
            buf.extend_from_slice(q);
            buf.sort_by_key(|&p| landing[p]);
            for (r, &p) in buf.iter().enumerate() {
                out[p] = r + 1;
            }
        }
        out
    }

    pub fn order_shift(&self, landing: &[Seconds]) -> Seconds {
        self.ranks(landing)
            .iter()
            .zip(&self.planned_rank)
            .map(|(&a, &b)| (a as Seconds - b as Seconds).abs())
            .sum()
    }

    pub fn arrival_delay(&self, fix: &[Seconds]) -> Seconds {
        fix.iter()
            .zip(&self.arr_planned_fix)
            .map(|(&t, &p)| if self.clamp { (t - p).max(0) } else { t - p })
            .sum()
    }

    pub fn rot_span(&self, takeoff: &[Seconds]) -> Seconds {
        match (takeoff.iter().max(), takeoff.iter().min()) {
            (Some(hi), Some(lo)) => hi - lo,
            _ => 0,
        }
    }

    pub fn departure_delay(&self, takeoff: &[Seconds]) -> Seconds {
        takeoff.iter().zip(&self.dep_planned).map(|(&t, &p)| t - p).sum()
    }

    pub fn upper(&self, fix: &[Seconds], landing: &[Seconds]) -> f64 {
        if self.peak {
            self.order_shift(landing) as f64
        } else {
            self.arrival_delay(fix) as f64
        }
    }

    pub fn lower(&self, takeoff: &[Seconds]) -> f64 {
        if self.peak {
            self.rot_span(takeoff) as f64
        } else {
            self.departure_delay(takeoff) as f64
        }
    }

    pub fn evaluate_vectors(&self, fix: &[Seconds], landing: &[Seconds], takeoff: &[Seconds]) -> ObjectiveValue {
        ObjectiveValue {
            upper: self.upper(fix, landing),
            lower: self.lower(takeoff),
            components: ObjectiveComponents {
                arr_order_shift_total: self.order_shift(landing),
                arr_delay_total_s: self.arrival_delay(fix),
                dep_rot_span_s: self.rot_span(takeoff),
                dep_delay_total_s: self.departure_delay(takeoff),
            },
        }
    }

    fn split(&self, instance: &Instance, schedule: &Schedule) -> Result<(Vec<Seconds>, Vec<Seconds>, Vec<Seconds>)> {
        let flights = instance.flights();
        let get = |i: usize| schedule.get(&flights[i].id).ok_or_else(|| Error::MissingFlight(flights[i].id.clone()));
        let mut fix = Vec::with_capacity(self.arrivals.len());
        let mut landing = Vec::with_capacity(self.arrivals.len());
        for &i in &self.arrivals {
            let t = get(i)?;
            fix.push(t.fix_time);
            landing.push(t.runway_time);
        }
        let takeoff = self.departures.iter().map(|&i| get(i).map(|t| t.runway_time)).collect::<Result<_>>()?;
        Ok((fix, landing, takeoff))
    }

    pub fn evaluate(&self, instance: &Instance, schedule: &Schedule) -> Result<ObjectiveValue> {
        let (fix, landing, takeoff) = self.split(instance, schedule)?;
        Ok(self.evaluate_vectors(&fix, &landing, &takeoff))
    }
}

/// Landing rank of every arrival within its runway queue.
pub fn landing_order(instance: &Instance, schedule: &Schedule) -> Result<HashMap<String, usize>> {
    let ctx = ObjectiveContext::new(instance, &ScenarioState::forced(true), &ObjectiveOptions::default());
    let (_, landing, _) = ctx.split(instance, schedule)?;
    let flights = instance.flights();
    Ok(ctx
        .ranks(&landing)
        .into_iter()
        .enumerate()
        .map(|(p, r)| (flights[ctx.arrivals[p]].id.clone(), r))
        .collect())
}

pub fn evaluate(
    instance: &Instance,
    schedule: &Schedule,
    scenario: &ScenarioState,
    opts: &ObjectiveOptions,
) -> Result<ObjectiveValue> {
    ObjectiveContext::new(instance, scenario, opts).evaluate(instance, schedule)
}

pub fn upper_objective(instance: &Instance, schedule: &Schedule, scenario: &ScenarioState) -> Result<f64> {
    evaluate(instance, schedule, scenario, &ObjectiveOptions::default()).map(|v| v.upper)
}

/// Zero when there are no departures, including in peak.
pub fn lower_objective(instance: &Instance, schedule: &Schedule, scenario: &ScenarioState) -> Result<f64> {
    evaluate(instance, schedule, scenario, &ObjectiveOptions::default()).map(|v| v.lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{FlightSpec, InstanceBuilder, ZSPD};
    use crate::domain::FlightTimes;
    use proptest::prelude::*;

    fn three_arrivals() -> Instance {
        InstanceBuilder::shanghai()
            .flight(FlightSpec::arrival("A1", ZSPD, "16L/34R", "AF1").at(2000))
            .flight(FlightSpec::arrival("A2", ZSPD, "16L/34R", "AF2").at(2100))
            .flight(FlightSpec::arrival("A3", ZSPD, "16L/34R", "AF3").at(2200))
            .build()
            .unwrap()
    }

    fn shift(s: &mut Schedule, id: &str, d: Seconds) {
        let t = s.get_mut(id).unwrap();
        t.fix_time += d;
        t.runway_time += d;
    }

    #[test]
    fn sorted_landings_rank_in_order() {
        let inst = three_arrivals();
        let ranks = landing_order(&inst, &Schedule::planned(&inst)).unwrap();
        assert_eq!((ranks["A1"], ranks["A2"], ranks["A3"]), (1, 2, 3));
    }

    #[test]
    fn transposition_swaps_ranks() {
        let inst = three_arrivals();
        let mut s = Schedule::planned(&inst);
        let (l1, l2) = (s.get("A1").unwrap().runway_time, s.get("A2").unwrap().runway_time);
        shift(&mut s, "A1", l2 - l1);
        shift(&mut s, "A2", l1 - l2);
        let ranks = landing_order(&inst, &s).unwrap();
        assert_eq!((ranks["A1"], ranks["A2"], ranks["A3"]), (2, 1, 3));
        assert_eq!(upper_objective(&inst, &s, &ScenarioState::forced(true)).unwrap(), 2.0);
    }

    #[test]
    fn ranks_are_per_runway() {
        let inst = InstanceBuilder::shanghai()
            .flight(FlightSpec::arrival("A1", ZSPD, "16L/34R", "AF1").at(2000))
            .flight(FlightSpec::arrival("A2", ZSPD, "17R/35L", "AF1").at(2100))
            .build()
            .unwrap();
        let ranks = landing_order(&inst, &Schedule::planned(&inst)).unwrap();
        assert_eq!((ranks["A1"], ranks["A2"]), (1, 1));
    }

    #[test]
    fn peak_without_reordering_is_zero() {
        let inst = three_arrivals();
        let mut s = Schedule::planned(&inst);
        shift(&mut s, "A3", 60);
        assert_eq!(upper_objective(&inst, &s, &ScenarioState::forced(true)).unwrap(), 0.0);
    }

    #[test]
    fn non_peak_sums_arrival_delay() {
        let inst = three_arrivals();
        let mut s = Schedule::planned(&inst);
        shift(&mut s, "A1", 60);
        shift(&mut s, "A2", 30);
        assert_eq!(upper_objective(&inst, &s, &ScenarioState::forced(false)).unwrap(), 90.0);
        shift(&mut s, "A3", -100);
        assert_eq!(upper_objective(&inst, &s, &ScenarioState::forced(false)).unwrap(), -10.0);
        let clamped = evaluate(&inst, &s, &ScenarioState::forced(false), &ObjectiveOptions { clamp_arrival_advance: true }).unwrap();
        assert_eq!(clamped.upper, 90.0);
    }

    fn departures(times: &[Seconds]) -> Instance {
        let mut b = InstanceBuilder::shanghai();
        for (i, &t) in times.iter().enumerate() {
            b = b.flight(FlightSpec::departure(&format!("D{i}"), ZSPD, "16R/34L", &format!("DF{}", i + 1)).at(t));
        }
        b.build().unwrap()
    }

    #[test]
    fn lower_span_and_delay() {
        let inst = departures(&[2100, 2700]);
        let s = Schedule::planned(&inst);
        assert_eq!(lower_objective(&inst, &s, &ScenarioState::forced(true)).unwrap(), 600.0);
        assert_eq!(lower_objective(&inst, &s, &ScenarioState::forced(false)).unwrap(), 0.0);
        let single = departures(&[2100]);
        assert_eq!(lower_objective(&single, &Schedule::planned(&single), &ScenarioState::forced(true)).unwrap(), 0.0);
        let none = departures(&[]);
        assert_eq!(lower_objective(&none, &Schedule::planned(&none), &ScenarioState::forced(true)).unwrap(), 0.0);
    }

    #[test]
    fn missing_flight_is_error() {
        let inst = three_arrivals();
        let mut s = Schedule::new();
        s.insert("A1", FlightTimes { fix_time: 0, runway_time: 0 });
        assert!(matches!(upper_objective(&inst, &s, &ScenarioState::forced(true)), Err(Error::MissingFlight(_))));
    }

    proptest! {
        #[test]
        fn objectives_invariant_under_translation(d in -1000i64..1000, peak in any::<bool>()) {
            let inst = three_arrivals();
            let sc = ScenarioState::forced(peak);
            let ctx = ObjectiveContext::new(&inst, &sc, &ObjectiveOptions::default());
            let fix = [1500, 1700, 1600];
            let landing = [2300, 2500, 2400];
            let base = ctx.evaluate_vectors(&fix, &landing, &[]);
            let moved_landing: Vec<_> = landing.iter().map(|t| t + d).collect();
            prop_assert_eq!(ctx.order_shift(&moved_landing), base.components.arr_order_shift_total);
        }
    }
}
