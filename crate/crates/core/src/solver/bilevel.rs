//! Bi-level co-evolutionary GA: arrivals form the leader population and
//! departures the follower population. Each co-iteration evolves the leader
//! against the follower elite, then the follower against the new leader
//! elite. Every individual kept in a population is feasible against the
//! opposite elite, so the merged elites always form a feasible schedule.
//!
//! Moves that need both levels to shift at once, such as delaying a
//! departure that must clear its runway before a paired arrival, cannot be
//! found one level at a time. Each level therefore remembers children that
//! failed only on arrival-departure clauses while improving its objective.
//! After each co-iteration the opposite elite is repaired around the best of
//! them with minimal displacement; if the repaired opposite is no worse on
//! its own objective, the pair replaces both elites.

use std::cmp::Ordering;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::feasibility::CompiledModel;
use super::{schedule_from_genes, verify, Algorithm, SolveResult, SolverConfig, TracePoint};
use crate::domain::{Instance, Seconds};
use crate::error::{Error, Result};
use crate::objective::ObjectiveContext;
use crate::scenario::ScenarioState;

type Genes = Vec<Seconds>;

/// Bound on the frustrated pool kept per level.
const POOL_CAP: usize = 64;
/// Frustrated children tried per coupling attempt.
const COUPLING_TRIES: usize = 8;

#[derive(Clone, Copy)]
enum Side {
    Upper,
    Lower,
}

struct Level {
    side: Side,
    /// Flight indices of this level's genes.
    idx: Vec<usize>,
    /// Edges with an endpoint in this level.
    edges: Vec<usize>,
    /// Edges with both endpoints in this level.
    own_edges: Vec<usize>,
    /// Positions into `idx` in planned runway-time order (ties by id).
    order: Vec<usize>,
    fcfs: Genes,
}

#[derive(Clone)]
struct Scored {
    genes: Genes,
    fitness: f64,
    /// Total distance from plan, the tie-break between equal fitness.
    deviation: Seconds,
}

fn better(a: &Scored, b: &Scored) -> Ordering {
    a.fitness.total_cmp(&b.fitness).then(a.deviation.cmp(&b.deviation))
}

struct LevelState {
    pop: Vec<Genes>,
    best: Scored,
    /// Children that satisfy this level's own clauses and beat the elite
    /// but clash with the opposite elite.
    frustrated: Vec<Scored>,
}

struct Engine<'a> {
    instance: &'a Instance,
    cm: &'a CompiledModel,
    ctx: &'a ObjectiveContext,
    config: &'a SolverConfig,
    rng: ChaCha8Rng,
    /// Full decision-time vector; the opposite level's elite lives here.
    work: Genes,
    evaluations: u64,
}

impl Engine<'_> {
    fn install(&mut self, level: &Level, genes: &[Seconds]) {
        for (p, &i) in level.idx.iter().enumerate() {
            self.work[i] = genes[p];
        }
    }

    fn feasible(&mut self, level: &Level, genes: &[Seconds]) -> bool {
        self.install(level, genes);
        self.cm.all_hold(&level.edges, &self.work)
    }

    fn score(&mut self, level: &Level, genes: Genes) -> Scored {
        self.evaluations += 1;
        let fitness = match level.side {
            Side::Upper => {
                let landing: Genes = level.idx.iter().zip(&genes).map(|(&i, &g)| g + self.cm.segment[i]).collect();
                self.ctx.upper(&genes, &landing)
            }
            Side::Lower => self.ctx.lower(&genes),
        };
        let deviation = level
            .idx
            .iter()
            .zip(&genes)
            .map(|(&i, &g)| (g - self.cm.domains[i].planned).abs())
            .sum();
        Scored {
            genes,
            fitness,
            deviation,
        }
    }

    fn sample_gene(&mut self, flight: usize) -> Seconds {
        let d = self.cm.domains[flight];
        d.value(self.rng.gen_range(d.k_min..=d.k_max), self.cm.step)
    }

    /// Resamples one to three genes of `base`, checking only the clauses
    /// that touch them. `base` must be feasible against the opposite elite.
    fn perturb(&mut self, level: &Level, base: &[Seconds]) -> Option<Genes> {
        let len = level.idx.len();
        for _ in 0..self.config.repair_retry_cap {
            let m = self.rng.gen_range(1..=3).min(len);
            let picks = sample(&mut self.rng, len, m).into_vec();
            let mut genes = base.to_vec();
            for &p in &picks {
                genes[p] = self.sample_gene(level.idx[p]);
            }
            self.install(level, &genes);
            let ok = picks
                .iter()
                .all(|&p| self.cm.incident[level.idx[p]].iter().all(|&e| self.cm.edge_holds(e, &self.work)));
            if ok {
                return Some(genes);
            }
        }
        None
    }

    /// A feasible stand-in for an infeasible individual.
    fn replacement(&mut self, level: &Level, elite: &[Seconds]) -> Genes {
        if let Some(g) = self.perturb(level, elite) {
            return g;
        }
        let fcfs = level.fcfs.clone();
        if self.feasible(level, &fcfs) {
            fcfs
        } else {
            elite.to_vec()
        }
    }

    fn rank_pick(&mut self, n: usize) -> usize {
        // Rank r (0 = best) has weight n - r.
        let total = n * (n + 1) / 2;
        let mut x = self.rng.gen_range(0..total);
        for r in 0..n {
            let w = n - r;
            if x < w {
                return r;
            }
            x -= w;
        }
        n - 1
    }

    fn initial_population(&mut self, level: &Level) -> Vec<Genes> {
        if level.idx.is_empty() {
            return Vec::new();
        }
        let mut pop = vec![level.fcfs.clone()];
        while pop.len() < self.config.population_size {
            let g = self.perturb(level, &level.fcfs).unwrap_or_else(|| level.fcfs.clone());
            pop.push(g);
        }
        self.install(level, &level.fcfs);
        pop
    }

    fn remember(&mut self, pool: &mut Vec<Scored>, s: &Scored) {
        if pool.iter().any(|p| p.genes == s.genes) {
            return;
        }
        if pool.len() < POOL_CAP {
            pool.push(s.clone());
        } else {
            let slot = self.rng.gen_range(0..POOL_CAP);
            pool[slot] = s.clone();
        }
    }

    /// Scores a child. A child that breaks its own level's clauses is
    /// first re-placed with minimal displacement; one that still clashes
    /// with the opposite elite is remembered if it improves the level, then
    /// swapped for a feasible stand-in.
    fn admit(&mut self, level: &Level, st: &mut LevelState, child: Genes) -> Scored {
        if self.feasible(level, &child) {
            return self.score(level, child);
        }
        let own = if self.cm.all_hold(&level.own_edges, &self.work) {
            Some(child)
        } else {
            self.place_nearest(level, &child, vec![false; self.work.len()])
        };
        if let Some(g) = own {
            if self.feasible(level, &g) {
                return self.score(level, g);
            }
            let s = self.score(level, g);
            if s.fitness < st.best.fitness {
                self.remember(&mut st.frustrated, &s);
            }
        }
        let best = st.best.genes.clone();
        let g = self.replacement(level, &best);
        self.score(level, g)
    }

    fn promote(st: &mut LevelState, candidate: &Scored) {
        if better(candidate, &st.best) == Ordering::Less {
            st.best = candidate.clone();
        }
    }

    /// Evolves the level for the configured number of generations against
    /// the opposite elite already installed in `work`. The level elite is
    /// feasible against that elite on entry and is the best individual seen
    /// on exit.
    fn evolve(&mut self, level: &Level, st: &mut LevelState) {
        if level.idx.is_empty() {
            return;
        }
        let cfg = self.config;
        let size = cfg.population_size;
        st.frustrated.clear();

        let mut scored: Vec<Scored> = Vec::with_capacity(size);
        for g in std::mem::take(&mut st.pop) {
            let s = self.admit(level, st, g);
            scored.push(s);
        }

        for _ in 0..cfg.level_generations {
            scored.sort_by(better);
            Self::promote(st, &scored[0]);
            let keep = match cfg.algorithm {
                Algorithm::BiEga => 1,
                Algorithm::BiSega => ((cfg.elite_fraction * size as f64).ceil() as usize).clamp(1, size),
                _ => 0,
            };
            let mut next: Vec<Scored> = scored[..keep].to_vec();
            while next.len() < size {
                let p1 = if cfg.algorithm == Algorithm::BiSega {
                    self.rng.gen_range(0..keep)
                } else {
                    self.rank_pick(scored.len())
                };
                let p2 = self.rank_pick(scored.len());
                let mut child = scored[p1].genes.clone();
                if self.rng.gen_bool(cfg.crossover_prob) {
                    for (c, &o) in child.iter_mut().zip(&scored[p2].genes) {
                        if self.rng.gen_bool(0.5) {
                            *c = o;
                        }
                    }
                }
                for p in 0..child.len() {
                    if self.rng.gen_bool(cfg.mutation_prob) {
                        child[p] = self.sample_gene(level.idx[p]);
                    }
                }
                let s = self.admit(level, st, child);
                next.push(s);
            }
            scored = next;
        }
        scored.sort_by(better);
        Self::promote(st, &scored[0]);
        st.frustrated.retain(|t| t.fitness < st.best.fitness);
        st.pop = scored.into_iter().map(|s| s.genes).collect();
        self.install(level, &st.best.genes.clone());
    }

    /// Places `level`'s flights in planned order, each at its `base` time
    /// when compatible with every flight placed so far, otherwise at the
    /// nearest compatible grid time (later first on equal distance). Flights
    /// marked in `placed` are fixed at their `work` times; clauses with
    /// unplaced flights are ignored.
    fn place_nearest(&mut self, level: &Level, base: &[Seconds], mut placed: Vec<bool>) -> Option<Genes> {
        let step = self.cm.step;
        let mut out = base.to_vec();
        for &p in &level.order {
            let i = level.idx[p];
            let d = self.cm.domains[i];
            let k0 = (base[p] - d.planned) / step;
            let reach = (d.k_max - k0).max(k0 - d.k_min);
            let found = (0..=reach)
                .flat_map(|r| [k0 + r, k0 - r].into_iter().take(if r == 0 { 1 } else { 2 }))
                .filter(|k| (d.k_min..=d.k_max).contains(k))
                .find(|&k| {
                    self.work[i] = d.value(k, step);
                    self.cm.incident[i].iter().all(|&e| {
                        let edge = &self.cm.edges[e];
                        let other = if edge.a == i { edge.b } else { edge.a };
                        !placed[other] || edge.holds(self.work[edge.a], self.work[edge.b])
                    })
                });
            found?;
            out[p] = self.work[i];
            placed[i] = true;
        }
        Some(out)
    }

    /// Tries to improve level `a` with one of its frustrated children by
    /// repairing level `b` around it, in turn: with minimal displacement
    /// from b's elite; greedily from the opening of b's windows; and, with
    /// the child's times as release times, greedily for both levels. A pair
    /// is accepted when neither level's fitness gets worse and at least one
    /// improves. Returns whether the elites changed.
    fn couple(&mut self, la: &Level, a: &mut LevelState, lb: &Level, b: &mut LevelState) -> bool {
        let mut frustrated = std::mem::take(&mut a.frustrated);
        frustrated.sort_by(better);
        let base = b.best.genes.clone();
        let opening: Genes = self.cm.domains.iter().map(|d| d.value(d.k_min, self.cm.step)).collect();
        for f in frustrated.iter().take(COUPLING_TRIES) {
            self.install(la, &f.genes);
            let mut placed = vec![false; self.work.len()];
            for &i in &la.idx {
                placed[i] = true;
            }
            let fixed: Vec<Option<Seconds>> = placed.iter().zip(&self.work).map(|(&p, &g)| p.then_some(g)).collect();
            let mut release = opening.clone();
            for &i in &la.idx {
                release[i] = self.work[i];
            }
            let candidates = [
                self.place_nearest(lb, &base, placed).map(|g| (f.genes.clone(), g)),
                self.cm.greedy_after(self.instance, &fixed, &opening).ok().map(|g| (f.genes.clone(), pick(lb, &g))),
                self.cm
                    .greedy_after(self.instance, &vec![None; fixed.len()], &release)
                    .ok()
                    .map(|g| (pick(la, &g), pick(lb, &g))),
            ];
            for (ga, gb) in candidates.into_iter().flatten() {
                let (sa, sb) = (self.score(la, ga), self.score(lb, gb));
                let no_worse = sa.fitness <= a.best.fitness && sb.fitness <= b.best.fitness;
                if no_worse && (sa.fitness < a.best.fitness || sb.fitness < b.best.fitness) {
                    a.best = sa;
                    b.best = sb;
                    self.install(la, &a.best.genes.clone());
                    self.install(lb, &b.best.genes.clone());
                    return true;
                }
            }
        }
        self.install(la, &a.best.genes.clone());
        self.install(lb, &base);
        false
    }
}

fn pick(level: &Level, genes: &[Seconds]) -> Genes {
    level.idx.iter().map(|&i| genes[i]).collect()
}

/// Runs bi-GA, bi-EGA or bi-SEGA as selected by `config.algorithm`. Both
/// populations are seeded with the FCFS schedule on the same time grid, so
/// neither level ends worse than that schedule.
pub fn bilevel_solve(instance: &Instance, scenario: &ScenarioState, config: &SolverConfig) -> Result<SolveResult> {
    let started = Instant::now();
    config.validate()?;
    if !config.algorithm.is_genetic() {
        return Err(Error::Config(format!("{} is not a bi-level GA", config.algorithm)));
    }
    let model_opts = config.model();
    let instance = model_opts.prepare(instance);
    let cm = CompiledModel::new(&instance, model_opts.crsspf, config.time_step)?;
    let ctx = ObjectiveContext::new(&instance, scenario, &config.objective_options());
    let fcfs = cm.greedy(&instance, &vec![None; cm.len()])?;

    let make_level = |side: Side, idx: &[usize]| {
        let edges = cm.edges_touching(idx);
        let own_edges = edges
            .iter()
            .copied()
            .filter(|&e| idx.contains(&cm.edges[e].a) && idx.contains(&cm.edges[e].b))
            .collect();
        let flights = instance.flights();
        let mut order: Vec<usize> = (0..idx.len()).collect();
        order.sort_by(|&p, &q| {
            let (a, b) = (&flights[idx[p]], &flights[idx[q]]);
            (a.planned_runway_time, &a.id).cmp(&(b.planned_runway_time, &b.id))
        });
        Level {
            side,
            idx: idx.to_vec(),
            edges,
            own_edges,
            order,
            fcfs: idx.iter().map(|&i| fcfs[i]).collect(),
        }
    };
    let upper = make_level(Side::Upper, ctx.arrival_indices());
    let lower = make_level(Side::Lower, ctx.departure_indices());

    let mut eng = Engine {
        instance: &instance,
        cm: &cm,
        ctx: &ctx,
        config,
        rng: ChaCha8Rng::seed_from_u64(config.rng_seed),
        work: fcfs.clone(),
        evaluations: 0,
    };
    let mut init = |level: &Level| {
        let best = eng.score(level, level.fcfs.clone());
        LevelState {
            pop: eng.initial_population(level),
            best,
            frustrated: Vec::new(),
        }
    };
    let mut u = init(&upper);
    let mut l = init(&lower);

    let mut trace = Vec::new();
    let mut stall = 0;
    for c in 0..config.co_iterations {
        let (prev_u, prev_l) = (u.best.fitness, l.best.fitness);
        eng.evolve(&upper, &mut u);
        eng.evolve(&lower, &mut l);
        // The leader's gains take priority.
        if !eng.couple(&upper, &mut u, &lower, &mut l) {
            eng.couple(&lower, &mut l, &upper, &mut u);
        }
        trace.push(TracePoint {
            co_iteration: c,
            upper_best: u.best.fitness,
            lower_best: l.best.fitness,
        });
        if u.best.fitness < prev_u || l.best.fitness < prev_l {
            stall = 0;
        } else {
            stall += 1;
            if stall >= config.stall_co_iterations {
                break;
            }
        }
    }

    let mut genes = fcfs;
    for (level, st) in [(&upper, &u), (&lower, &l)] {
        for (p, &i) in level.idx.iter().enumerate() {
            genes[i] = st.best.genes[p];
        }
    }
    let schedule = schedule_from_genes(&instance, &cm, &genes);
    verify(&instance, &schedule, &model_opts)?;
    let objective = ctx.evaluate(&instance, &schedule)?;
    Ok(SolveResult {
        algorithm: config.algorithm,
        model: model_opts,
        schedule,
        objective,
        convergence: trace,
        evaluations: eng.evaluations,
        wall_time: started.elapsed().as_secs_f64(),
    })
}
