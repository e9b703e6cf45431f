//! Separation clauses compiled to difference constraints over decision
//! times, for fast repeated checks inside the solvers.
//!
//! A decision time (gene) is the arrival-fix time of an arrival or the
//! take-off time of a departure. Every runway and fix event of a flight is
//! its gene plus a fixed offset, so each pairwise clause becomes
//! `gene[b] - gene[a] >= gap`, or `|gene[b] - gene[a]| >= gap` for the
//! symmetric arrival handover clause. The constraint engine remains the
//! reference; this module is re-derived from the same rules.

use crate::domain::{Flight, FlightKind, Instance, Seconds};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Edge {
    pub a: usize,
    pub b: usize,
    pub gap: Seconds,
    pub symmetric: bool,
}

impl Edge {
    #[inline]
    pub fn holds(&self, ga: Seconds, gb: Seconds) -> bool {
        if self.symmetric {
            (gb - ga).abs() >= self.gap
        } else {
            gb - ga >= self.gap
        }
    }
}

/// Grid-aligned domain of one decision time: `planned + k * step` for
/// `k` in `k_min..=k_max`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Domain {
    pub planned: Seconds,
    pub k_min: i64,
    pub k_max: i64,
}

impl Domain {
    pub fn value(&self, k: i64, step: Seconds) -> Seconds {
        self.planned + k * step
    }
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledModel {
    pub step: Seconds,
    pub is_arrival: Vec<bool>,
    pub segment: Vec<Seconds>,
    pub domains: Vec<Domain>,
    pub edges: Vec<Edge>,
    /// Edge ids incident to each flight.
    pub incident: Vec<Vec<usize>>,
    ids: Vec<String>,
}

fn lead_follow<'a>(
    flights: &'a [Flight],
    i: usize,
    j: usize,
    key: impl Fn(&Flight) -> Seconds,
) -> (usize, usize) {
    let (x, y) = (&flights[i], &flights[j]);
    if (key(x), &x.id) < (key(y), &y.id) {
        (i, j)
    } else {
        (j, i)
    }
}

impl CompiledModel {
    pub fn new(instance: &Instance, crsspf: bool, step: Seconds) -> Result<Self> {
        if step <= 0 {
            return Err(Error::Config("time step must be positive".into()));
        }
        let flights = instance.flights();
        let cfg = instance.separation();
        let n = flights.len();
        let segment: Vec<Seconds> = (0..n).map(|i| instance.segment_time(i)).collect();
        let is_arrival: Vec<bool> = flights.iter().map(|f| f.is_arrival()).collect();

        // Offsets of runway and fix events relative to the gene.
        let rw_off = |i: usize| if is_arrival[i] { segment[i] } else { 0 };
        let fix_off = |i: usize| if is_arrival[i] { 0 } else { segment[i] };

        let mut edges = Vec::new();
        let runway_edge = |a: usize, b: usize, sep: Seconds, edges: &mut Vec<Edge>| {
            edges.push(Edge {
                a,
                b,
                gap: sep + rw_off(a) - rw_off(b),
                symmetric: false,
            });
        };

        for i in 0..n {
            for j in i + 1..n {
                let (fi, fj) = (&flights[i], &flights[j]);
                let same_airport = fi.airport_id == fj.airport_id;
                match (fi.kind, fj.kind) {
                    (FlightKind::Arrival, FlightKind::Arrival) => {
                        if same_airport && fi.runway_id == fj.runway_id {
                            let (l, f) = lead_follow(flights, i, j, |x| x.planned_runway_time);
                            let sep = cfg.wake(flights[f].class, flights[l].class, FlightKind::Arrival);
                            runway_edge(l, f, sep, &mut edges);
                        }
                        if crsspf && same_airport && fi.fix_id == fj.fix_id {
                            let (l, f) = lead_follow(flights, i, j, |x| x.planned_fix_time);
                            runway_edge(l, f, 1, &mut edges);
                        }
                        if fi.fix_id == fj.fix_id && fi.handover_altitude_slot == fj.handover_altitude_slot {
                            edges.push(Edge {
                                a: i,
                                b: j,
                                gap: cfg.handover_sep_arr,
                                symmetric: true,
                            });
                        }
                    }
                    (FlightKind::Departure, FlightKind::Departure) => {
                        if same_airport && fi.runway_id == fj.runway_id {
                            let (l, f) = lead_follow(flights, i, j, |x| x.planned_runway_time);
                            let sep = cfg.wake(flights[f].class, flights[l].class, FlightKind::Departure);
                            runway_edge(l, f, sep, &mut edges);
                        }
                        if same_airport && fi.fix_id == fj.fix_id {
                            let (l, f) = lead_follow(flights, i, j, |x| x.planned_runway_time);
                            runway_edge(l, f, cfg.clearance_sep, &mut edges);
                            if crsspf {
                                edges.push(Edge {
                                    a: l,
                                    b: f,
                                    gap: 1 + fix_off(l) - fix_off(f),
                                    symmetric: false,
                                });
                            }
                        }
                        if fi.fix_id == fj.fix_id && fi.handover_altitude_slot == fj.handover_altitude_slot {
                            let (l, f) = lead_follow(flights, i, j, |x| x.planned_fix_time);
                            edges.push(Edge {
                                a: l,
                                b: f,
                                gap: cfg.handover_sep_dep + fix_off(l) - fix_off(f),
                                symmetric: false,
                            });
                        }
                    }
                    _ => {
                        let (arr, dep) = if fi.is_arrival() { (i, j) } else { (j, i) };
                        let (fa, fd) = (&flights[arr], &flights[dep]);
                        let paired = same_airport
                            && instance
                                .airport(&fa.airport_id)
                                .is_some_and(|ap| ap.close_pair_unchecked(&fa.runway_id, &fd.runway_id));
                        if !paired {
                            continue;
                        }
                        if fa.planned_runway_time > fd.planned_runway_time {
                            runway_edge(dep, arr, cfg.dep_clear_time, &mut edges);
                        }
                        let vacate = fa.vacate_time(cfg);
                        let waived = instance.airport(&fa.airport_id).is_some_and(|ap| ap.has_end_around_taxiway)
                            && fa.wingspan_m < cfg.crossing_wingspan_threshold_m;
                        if fd.planned_runway_time > fa.planned_runway_time + vacate && !waived {
                            runway_edge(arr, dep, vacate + cfg.cross_time, &mut edges);
                        }
                    }
                }
            }
        }

        let mut incident = vec![Vec::new(); n];
        for (e, edge) in edges.iter().enumerate() {
            incident[edge.a].push(e);
            incident[edge.b].push(e);
        }

        let offset = cfg.position_shift_offset;
        let domains = flights
            .iter()
            .map(|f| {
                let (lo, hi) = f.position_shift_window(offset);
                let planned = f.planned_decision_time();
                Domain {
                    planned,
                    k_min: -((planned - lo) / step),
                    k_max: (hi - planned) / step,
                }
            })
            .collect();

        Ok(Self {
            step,
            is_arrival,
            segment,
            domains,
            edges,
            incident,
            ids: flights.iter().map(|f| f.id.clone()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.is_arrival.len()
    }

    pub fn planned(&self) -> Vec<Seconds> {
        self.domains.iter().map(|d| d.planned).collect()
    }

    /// Runway and fix times implied by a gene.
    pub fn events(&self, i: usize, gene: Seconds) -> (Seconds, Seconds) {
        if self.is_arrival[i] {
            (gene + self.segment[i], gene)
        } else {
            (gene, gene + self.segment[i])
        }
    }

    #[inline]
    pub fn edge_holds(&self, e: usize, genes: &[Seconds]) -> bool {
        let edge = &self.edges[e];
        edge.holds(genes[edge.a], genes[edge.b])
    }

    pub fn all_hold(&self, edge_ids: &[usize], genes: &[Seconds]) -> bool {
        edge_ids.iter().all(|&e| self.edge_holds(e, genes))
    }

    #[cfg(test)]
    pub fn feasible(&self, genes: &[Seconds]) -> bool {
        (0..self.edges.len()).all(|e| self.edge_holds(e, genes))
    }

    /// Edge ids with at least one endpoint among `members`.
    pub fn edges_touching(&self, members: &[usize]) -> Vec<usize> {
        let mut mark = vec![false; self.len()];
        for &m in members {
            mark[m] = true;
        }
        (0..self.edges.len())
            .filter(|&e| mark[self.edges[e].a] || mark[self.edges[e].b])
            .collect()
    }

    /// Greedy earliest-feasible placement in ascending planned runway time
    /// (ties by id). Flights with a value in `fixed` are pre-placed and kept;
    /// the others take the earliest grid time at or after plan that
    /// satisfies every clause against the flights placed so far.
    pub fn greedy(&self, instance: &Instance, fixed: &[Option<Seconds>]) -> Result<Vec<Seconds>> {
        self.greedy_after(instance, fixed, &self.planned())
    }

    /// As [`CompiledModel::greedy`], but each free flight's scan starts at
    /// the first grid time at or after `release[i]` (clamped to its window),
    /// so arrivals may be advanced.
    pub fn greedy_after(&self, instance: &Instance, fixed: &[Option<Seconds>], release: &[Seconds]) -> Result<Vec<Seconds>> {
        let flights = instance.flights();
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            (flights[a].planned_runway_time, &flights[a].id).cmp(&(flights[b].planned_runway_time, &flights[b].id))
        });
        let mut genes = self.planned();
        let mut placed = vec![false; n];
        for i in 0..n {
            if let Some(g) = fixed[i] {
                genes[i] = g;
                placed[i] = true;
            }
        }
        for &i in &order {
            if placed[i] {
                continue;
            }
            let d = self.domains[i];
            let first = (release[i] - d.planned).div_euclid(self.step)
                + ((release[i] - d.planned).rem_euclid(self.step) != 0) as i64;
            let first = first.clamp(d.k_min, d.k_max);
            let mut found = false;
            for k in first..=d.k_max {
                genes[i] = d.value(k, self.step);
                let ok = self.incident[i].iter().all(|&e| {
                    let edge = &self.edges[e];
                    let other = if edge.a == i { edge.b } else { edge.a };
                    !placed[other] || edge.holds(genes[edge.a], genes[edge.b])
                });
                if ok {
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(Error::Infeasible {
                    flight: self.ids[i].clone(),
                });
            }
            placed[i] = true;
        }
        Ok(genes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{check_schedule_with, CheckOptions};
    use crate::solver::schedule_from_genes;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        // The compiled difference constraints agree with the constraint
        // engine on every in-window gene vector.
        #[test]
        fn compiled_model_agrees_with_engine(
            n in 2usize..=6,
            seed in any::<u64>(),
            crsspf in any::<bool>(),
            picks in prop::collection::vec(-1.0f64..1.0, 6),
        ) {
            let inst = crate::io::generate_micro_instance(n, seed).unwrap();
            let model = CompiledModel::new(&inst, crsspf, 1).unwrap();
            // Cubing biases picks towards plan so that both outcomes occur.
            let genes: Vec<Seconds> = model
                .domains
                .iter()
                .zip(&picks)
                .map(|(d, p)| {
                    let reach = if *p < 0.0 { -d.k_min } else { d.k_max };
                    d.value((p.powi(3) * reach as f64).round() as i64, model.step)
                })
                .collect();
            let schedule = schedule_from_genes(&inst, &model, &genes);
            let report = check_schedule_with(&inst, &schedule, &CheckOptions { crsspf }).unwrap();
            prop_assert_eq!(model.feasible(&genes), report.is_empty(), "{:?}", report);
        }
    }
}
