//! Event-driven List-FP simulation of a single DAG job.
//!
//! One engine drives both execution environments: `M` dedicated processors
//! (preemptive or non-preemptive dispatching) and a reservation system whose
//! momentary capacity is the number of reservations currently inside a
//! service window. Timestamps are exact rationals, so fractional budgets
//! and supply windows simulate without drift.
//!
//! Dispatching rules:
//! * a subjob arrives once all predecessors have finished; arrived and
//!   unfinished subjobs are pending;
//! * at every event the pending subjobs are mapped to the available slots
//!   highest priority first, ties broken by ascending vertex id;
//! * preemptive mode evicts a strictly lower-priority running subjob when a
//!   higher-priority one is waiting; the victim is chosen among candidates
//!   by preferring subjobs that were preempted before, then the highest
//!   vertex id;
//! * non-preemptive mode (dedicated processors only) lets every started
//!   subjob run to completion.

use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds::{bound_nonpreemptive, bound_preemptive};
use crate::collection::PathCollection;
use crate::error::{Error, Result};
use crate::reservation::Reservation;
use crate::task::{DagTask, Path, VertexId};
use crate::time::{time, Time};

/// Fixed subjob priorities; a larger value means a higher priority.
#[derive(Debug, Clone)]
pub struct PriorityAssignment {
    prio: Vec<i64>,
}

impl PriorityAssignment {
    pub fn new(prio: Vec<i64>) -> Self {
        PriorityAssignment { prio }
    }

    /// The canonical two-level scheme: collection subjobs get priority 1,
    /// all other subjobs priority 2 (collection subjobs rank strictly
    /// below the rest).
    pub fn two_level(task: &DagTask, collection: &PathCollection) -> Self {
        let prio = task
            .vertices()
            .map(|v| if collection.is_covered(v) { 1 } else { 2 })
            .collect();
        PriorityAssignment { prio }
    }

    pub fn priority(&self, v: VertexId) -> i64 {
        self.prio[v]
    }

    /// True iff every collection subjob has strictly lower priority than
    /// every non-collection subjob.
    pub fn is_parallel_path_progression(&self, collection: &PathCollection) -> bool {
        let max_covered = self
            .prio
            .iter()
            .enumerate()
            .filter(|(v, _)| collection.is_covered(*v))
            .map(|(_, &p)| p)
            .max();
        let min_uncovered = self
            .prio
            .iter()
            .enumerate()
            .filter(|(v, _)| !collection.is_covered(*v))
            .map(|(_, &p)| p)
            .min();
        match (max_covered, min_uncovered) {
            (Some(hi), Some(lo)) => hi < lo,
            _ => true,
        }
    }
}

/// Dedicated-processor dispatching flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Preemptive,
    NonPreemptive,
}

/// A maximal execution window of one vertex on one slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecInterval {
    pub start: Time,
    pub end: Time,
    pub vertex: VertexId,
}

/// Everything a simulation run produced.
#[derive(Debug, Clone)]
pub struct ScheduleTrace {
    /// Execution intervals per processor (or reservation), time-ordered.
    pub processors: Vec<Vec<ExecInterval>>,
    pub arrival: Vec<Option<Time>>,
    pub finish: Vec<Option<Time>>,
    /// Finishing time of the whole job (meaningful when `completed`).
    pub makespan: Time,
    /// Backward chain of latest-finishing predecessors from the last
    /// finisher; empty when the run did not complete.
    pub envelope: Path,
    /// Cumulative time an envelope subjob executes.
    pub busy_time: Time,
    /// `makespan - busy_time`.
    pub nonbusy_time: Time,
    /// Policy preemptions (supply windows closing do not count).
    pub preemptions: usize,
    /// False when the supply ran out before the job finished.
    pub completed: bool,
}

impl ScheduleTrace {
    /// Largest number of simultaneously pending vertices of `subset`
    /// (pending = arrived and not finished).
    pub fn max_concurrent_pending(&self, subset: &[bool]) -> usize {
        let mut events: Vec<(Time, i64)> = Vec::new();
        for v in 0..subset.len() {
            if !subset[v] {
                continue;
            }
            if let (Some(a), Some(f)) = (self.arrival[v], self.finish[v]) {
                if a < f {
                    events.push((a, 1));
                    events.push((f, -1));
                }
            }
        }
        // Process departures before arrivals at equal instants.
        events.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut cur = 0i64;
        let mut max = 0i64;
        for (_, delta) in events {
            cur += delta;
            max = max.max(cur);
        }
        max as usize
    }

    /// Plain-text Gantt chart, one line per processor.
    pub fn render_gantt(&self) -> String {
        let mut out = String::new();
        for (p, intervals) in self.processors.iter().enumerate() {
            out.push_str(&format!("P{:<2}", p));
            for iv in intervals {
                out.push_str(&format!(" [{}, {}) v{}", iv.start, iv.end, iv.vertex));
            }
            out.push('\n');
        }
        out
    }
}

/// Service windows per reservation inside `[0, D)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupplyTrace {
    pub windows: Vec<Vec<(Time, Time)>>,
}

impl SupplyTrace {
    /// Uninterrupted service on `m` slots for the whole window `[0, d)`;
    /// valid for reservations whose budgets all equal the deadline.
    pub fn full(m: usize, d: u64) -> Self {
        SupplyTrace {
            windows: vec![vec![(Time::zero(), time(d))]; m],
        }
    }

    /// Checks the supply against the reservation contract: one window list
    /// per reservation, windows disjoint and inside `[0, D)`, each list
    /// summing to exactly its budget, and identical lists for a gang.
    pub fn validate(&self, reservation: &Reservation) -> Result<()> {
        let budgets = reservation.budgets();
        if self.windows.len() != budgets.len() {
            return Err(Error::SupplyBudgetMismatch(format!(
                "{} window lists for {} reservations",
                self.windows.len(),
                budgets.len()
            )));
        }
        let d = time(reservation.deadline());
        for (p, (list, budget)) in self.windows.iter().zip(&budgets).enumerate() {
            let mut sum = Time::zero();
            let mut prev_end = Time::zero();
            for &(start, end) in list {
                if start < Time::zero() || end > d || start >= end {
                    return Err(Error::SupplyBudgetMismatch(format!(
                        "reservation {} has an invalid window [{}, {})",
                        p, start, end
                    )));
                }
                if start < prev_end {
                    return Err(Error::SupplyBudgetMismatch(format!(
                        "reservation {} has overlapping windows",
                        p
                    )));
                }
                prev_end = end;
                sum += end - start;
            }
            if sum != *budget {
                return Err(Error::SupplyBudgetMismatch(format!(
                    "reservation {} delivers {} instead of {}",
                    p, sum, budget
                )));
            }
        }
        if let Reservation::Gang(_) = reservation {
            if self.windows.windows(2).any(|w| w[0] != w[1]) {
                return Err(Error::SupplyBudgetMismatch(
                    "gang reservations must share identical windows".into(),
                ));
            }
        }
        Ok(())
    }
}

/// How an adversarial supply schedules the promised service.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupplyPreset {
    /// All service as late as possible: one window ending at the deadline.
    Latest,
    /// Service split into eight slices, each pushed as late as its
    /// preceding gap allows; the last slice ends at the deadline.
    Fragmented,
    /// Seeded random windows on a rational grid.
    Random(u64),
}

/// Generates a supply trace that delivers exactly the promised budgets in
/// an adversarial layout. Gang reservations share one window set.
pub fn adversarial_supply(reservation: &Reservation, preset: SupplyPreset) -> SupplyTrace {
    let d = time(reservation.deadline());
    let budgets = reservation.budgets();
    let gang = matches!(reservation, Reservation::Gang(_));
    let mut rng = match preset {
        SupplyPreset::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut windows: Vec<Vec<(Time, Time)>> = Vec::with_capacity(budgets.len());
    for (p, &budget) in budgets.iter().enumerate() {
        if gang && p > 0 {
            windows.push(windows[0].clone());
            continue;
        }
        let list = match preset {
            SupplyPreset::Latest => {
                if budget.is_zero() {
                    Vec::new()
                } else {
                    vec![(d - budget, d)]
                }
            }
            SupplyPreset::Fragmented => fragmented_windows(budget, d, 8),
            SupplyPreset::Random(_) => random_windows(budget, d, rng.as_mut().unwrap()),
        };
        windows.push(list);
    }
    SupplyTrace { windows }
}

/// `k` equal service slices separated by equal gaps, ending at `d`.
fn fragmented_windows(budget: Time, d: Time, k: i64) -> Vec<(Time, Time)> {
    if budget.is_zero() {
        return Vec::new();
    }
    let slice = budget / time(k as u64);
    let gap = (d - budget) / time(k as u64);
    let mut out = Vec::with_capacity(k as usize);
    let mut pos = Time::zero();
    for _ in 0..k {
        pos += gap;
        out.push((pos, pos + slice));
        pos += slice;
    }
    debug_assert_eq!(out.last().unwrap().1, d);
    out
}

/// Random windows on the grid `1/(8 * denom(budget))`, exact by
/// construction.
fn random_windows(budget: Time, d: Time, rng: &mut ChaCha8Rng) -> Vec<(Time, Time)> {
    if budget.is_zero() {
        return Vec::new();
    }
    let grid = 8 * budget.denom();
    let units = |t: Time| -> u64 {
        let scaled = t * Time::from_integer(grid);
        debug_assert!(scaled.is_integer());
        scaled.to_integer() as u64
    };
    let service = units(budget);
    let idle = units(d) - service;

    // Split the service into k chunks, the idle time into k + 1 gaps.
    let k = rng.gen_range(1..=4u64.min(service)) as usize;
    let mut cuts = std::collections::BTreeSet::new();
    while cuts.len() < k - 1 {
        cuts.insert(rng.gen_range(1..service));
    }
    let mut chunks = Vec::with_capacity(k);
    let mut prev = 0;
    for &c in cuts.iter().chain(std::iter::once(&service)) {
        chunks.push(c - prev);
        prev = c;
    }
    let mut gap_cuts: Vec<u64> = (0..k).map(|_| rng.gen_range(0..=idle)).collect();
    gap_cuts.sort_unstable();
    let mut gaps = Vec::with_capacity(k + 1);
    let mut prev = 0;
    for &c in gap_cuts.iter().chain(std::iter::once(&idle)) {
        gaps.push(c - prev);
        prev = c;
    }

    let to_time = |u: u64| Time::new(u as i64, grid);
    let mut out = Vec::with_capacity(k);
    let mut pos = 0u64;
    for (chunk, gap) in chunks.iter().zip(&gaps) {
        pos += gap;
        out.push((to_time(pos), to_time(pos + chunk)));
        pos += chunk;
    }
    out
}

/// Simulates one job on `m` dedicated processors. `exec_times`, when given,
/// replaces the per-vertex execution times (each at most the wcet).
pub fn simulate_dedicated(
    task: &DagTask,
    priorities: &PriorityAssignment,
    m: usize,
    mode: Mode,
    exec_times: Option<&[Time]>,
) -> Result<ScheduleTrace> {
    assert!(m >= 1, "processor count must be at least 1");
    let exec = resolve_exec_times(task, exec_times);
    Engine::new(task, priorities, mode, exec, Capacity::Dedicated(m))?.run()
}

/// Simulates one job under a reservation system delivering the given
/// supply. Internal dispatching is preemptive; the momentary processor
/// count is the number of reservations currently in service.
pub fn simulate_supply(
    task: &DagTask,
    priorities: &PriorityAssignment,
    reservation: &Reservation,
    supply: &SupplyTrace,
) -> Result<ScheduleTrace> {
    supply.validate(reservation)?;
    let exec = resolve_exec_times(task, None);
    Engine::new(
        task,
        priorities,
        Mode::Preemptive,
        exec,
        Capacity::Windows(&supply.windows),
    )?
    .run()
}

fn resolve_exec_times(task: &DagTask, exec_times: Option<&[Time]>) -> Vec<Time> {
    match exec_times {
        Some(e) => {
            assert_eq!(e.len(), task.vertex_count(), "execution time map length");
            for (v, &x) in e.iter().enumerate() {
                assert!(
                    x >= Time::zero() && x <= time(task.wcet(v)),
                    "execution time of vertex {} outside [0, wcet]",
                    v
                );
            }
            e.to_vec()
        }
        None => task.wcets().iter().map(|&w| time(w)).collect(),
    }
}

enum Capacity<'a> {
    Dedicated(usize),
    Windows(&'a [Vec<(Time, Time)>]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VertexState {
    NotArrived,
    Pending,
    Running(usize),
    Finished,
}

struct Engine<'a> {
    task: &'a DagTask,
    prio: &'a PriorityAssignment,
    mode: Mode,
    succs: Vec<Vec<VertexId>>,
    exec: Vec<Time>,
    remaining: Vec<Time>,
    state: Vec<VertexState>,
    unfinished_preds: Vec<usize>,
    arrival: Vec<Option<Time>>,
    finish: Vec<Option<Time>>,
    started: Vec<bool>,
    was_preempted: Vec<bool>,
    slots: Vec<Option<VertexId>>,
    run_since: Vec<Time>,
    intervals: Vec<Vec<ExecInterval>>,
    // Per-slot service windows (None = always available) and a cursor into
    // each window list.
    windows: Option<Vec<Vec<(Time, Time)>>>,
    cursors: Vec<usize>,
    boundaries: Vec<Time>,
    finished_count: usize,
    preemptions: usize,
}

impl<'a> Engine<'a> {
    fn new(
        task: &'a DagTask,
        prio: &'a PriorityAssignment,
        mode: Mode,
        exec: Vec<Time>,
        capacity: Capacity<'a>,
    ) -> Result<Engine<'a>> {
        assert_eq!(
            prio.prio.len(),
            task.vertex_count(),
            "priority map length"
        );
        task.topological_order()?;
        let n = task.vertex_count();
        let adj = task.adjacency();
        let (slot_count, windows) = match capacity {
            Capacity::Dedicated(m) => (m, None),
            Capacity::Windows(w) => (w.len(), Some(w.to_vec())),
        };
        let mut boundaries: Vec<Time> = windows
            .iter()
            .flatten()
            .flatten()
            .flat_map(|&(s, e)| [s, e])
            .collect();
        boundaries.sort();
        boundaries.dedup();
        Ok(Engine {
            task,
            prio,
            mode,
            unfinished_preds: (0..n).map(|v| adj.preds[v].len()).collect(),
            succs: adj.succs,
            remaining: exec.clone(),
            exec,
            state: vec![VertexState::NotArrived; n],
            arrival: vec![None; n],
            finish: vec![None; n],
            started: vec![false; n],
            was_preempted: vec![false; n],
            slots: vec![None; slot_count],
            run_since: vec![Time::zero(); slot_count],
            intervals: vec![Vec::new(); slot_count],
            windows,
            cursors: vec![0; slot_count],
            boundaries,
            finished_count: 0,
            preemptions: 0,
        })
    }

    fn slot_open(&mut self, slot: usize, t: Time) -> bool {
        match &self.windows {
            None => true,
            Some(windows) => {
                let list = &windows[slot];
                let cur = &mut self.cursors[slot];
                while *cur < list.len() && list[*cur].1 <= t {
                    *cur += 1;
                }
                *cur < list.len() && list[*cur].0 <= t
            }
        }
    }

    fn arrive(&mut self, v: VertexId, t: Time) {
        debug_assert_eq!(self.state[v], VertexState::NotArrived);
        self.arrival[v] = Some(t);
        if self.remaining[v].is_zero() {
            self.complete(v, t);
        } else {
            self.state[v] = VertexState::Pending;
        }
    }

    fn complete(&mut self, v: VertexId, t: Time) {
        self.state[v] = VertexState::Finished;
        self.finish[v] = Some(t);
        self.finished_count += 1;
        for i in 0..self.succs[v].len() {
            let s = self.succs[v][i];
            self.unfinished_preds[s] -= 1;
            if self.unfinished_preds[s] == 0 {
                self.arrive(s, t);
            }
        }
    }

    fn evict(&mut self, slot: usize, t: Time) -> VertexId {
        let v = self.slots[slot].take().expect("evicting an empty slot");
        self.intervals[slot].push(ExecInterval {
            start: self.run_since[slot],
            end: t,
            vertex: v,
        });
        self.state[v] = VertexState::Pending;
        v
    }

    fn place(&mut self, slot: usize, v: VertexId, t: Time) {
        debug_assert!(self.slots[slot].is_none());
        self.slots[slot] = Some(v);
        self.run_since[slot] = t;
        self.state[v] = VertexState::Running(slot);
        self.started[v] = true;
    }

    /// Highest-priority pending subjob not currently running, ties by
    /// ascending vertex id.
    fn best_waiting(&self) -> Option<VertexId> {
        (0..self.task.vertex_count())
            .filter(|&v| self.state[v] == VertexState::Pending)
            .max_by(|&a, &b| {
                self.prio
                    .priority(a)
                    .cmp(&self.prio.priority(b))
                    .then(b.cmp(&a))
            })
    }

    fn dispatch(&mut self, t: Time) {
        let open: Vec<bool> = (0..self.slots.len())
            .map(|s| self.slot_open(s, t))
            .collect();
        // Suspend occupants of slots that are out of service at t.
        for slot in 0..self.slots.len() {
            if self.slots[slot].is_some() && !open[slot] {
                self.evict(slot, t);
            }
        }
        loop {
            let Some(candidate) = self.best_waiting() else {
                break;
            };
            if self.mode == Mode::NonPreemptive && self.started[candidate] {
                // A started non-preemptive subjob only leaves its slot by
                // finishing; with dedicated processors this cannot happen.
                break;
            }
            let free = (0..self.slots.len()).find(|&s| self.slots[s].is_none() && open[s]);
            if let Some(slot) = free {
                self.place(slot, candidate, t);
                continue;
            }
            if self.mode == Mode::NonPreemptive {
                break;
            }
            // Preempt the weakest strictly lower-priority running subjob,
            // preferring previous victims, then the highest vertex id.
            let victim_slot = (0..self.slots.len())
                .filter(|&s| open[s])
                .filter_map(|s| self.slots[s].map(|v| (s, v)))
                .filter(|&(_, v)| self.prio.priority(v) < self.prio.priority(candidate))
                .max_by_key(|&(_, v)| (self.was_preempted[v], v))
                .map(|(s, _)| s);
            let Some(slot) = victim_slot else {
                break;
            };
            let victim = self.evict(slot, t);
            self.was_preempted[victim] = true;
            self.preemptions += 1;
            self.place(slot, candidate, t);
        }
    }

    fn run(mut self) -> Result<ScheduleTrace> {
        let n = self.task.vertex_count();
        let mut t = Time::zero();
        for v in 0..n {
            // Zero-execution sources may already have cascaded arrivals.
            if self.unfinished_preds[v] == 0 && self.state[v] == VertexState::NotArrived {
                self.arrive(v, t);
            }
        }
        while self.finished_count < n {
            self.dispatch(t);
            // Next event: earliest running completion or capacity change.
            let mut next: Option<Time> = None;
            for slot in 0..self.slots.len() {
                if let Some(v) = self.slots[slot] {
                    let done = t + self.remaining[v];
                    next = Some(next.map_or(done, |x: Time| x.min(done)));
                }
            }
            if let Some(edge) = self.boundaries.iter().find(|&&b| b > t) {
                next = Some(next.map_or(*edge, |x: Time| x.min(*edge)));
            }
            let Some(next_t) = next else {
                break; // supply exhausted with work left
            };
            debug_assert!(next_t > t);
            let delta = next_t - t;
            for slot in 0..self.slots.len() {
                let Some(v) = self.slots[slot] else { continue };
                self.remaining[v] -= delta;
                if self.remaining[v].is_zero() {
                    self.slots[slot] = None;
                    self.intervals[slot].push(ExecInterval {
                        start: self.run_since[slot],
                        end: next_t,
                        vertex: v,
                    });
                    self.complete(v, next_t);
                }
            }
            t = next_t;
        }

        let completed = self.finished_count == n;
        let makespan = self
            .finish
            .iter()
            .flatten()
            .copied()
            .max()
            .unwrap_or_else(Time::zero);
        let (envelope, busy_time) = if completed {
            let finish: Vec<Time> = self.finish.iter().map(|f| f.unwrap()).collect();
            let envelope = extract_envelope(self.task, &finish);
            let busy = envelope
                .vertices()
                .iter()
                .map(|&v| self.exec[v])
                .sum::<Time>();
            (envelope, busy)
        } else {
            (Path::new(Vec::new()), Time::zero())
        };
        Ok(ScheduleTrace {
            processors: self.intervals,
            arrival: self.arrival,
            finish: self.finish,
            makespan,
            nonbusy_time: makespan - busy_time,
            busy_time,
            envelope,
            preemptions: self.preemptions,
            completed,
        })
    }
}

/// Walks backward from the vertex with the maximal finishing time, at each
/// step moving to the predecessor with the maximal finishing time, until a
/// source is reached. Ties are broken by ascending vertex id.
pub fn extract_envelope(task: &DagTask, finish: &[Time]) -> Path {
    let n = task.vertex_count();
    if n == 0 {
        return Path::new(Vec::new());
    }
    let adj = task.adjacency();
    let latest = |candidates: &[VertexId]| -> VertexId {
        *candidates
            .iter()
            .max_by(|&&a, &&b| finish[a].cmp(&finish[b]).then(b.cmp(&a)))
            .unwrap()
    };
    let all: Vec<VertexId> = (0..n).collect();
    let mut cur = latest(&all);
    let mut chain = vec![cur];
    while !adj.preds[cur].is_empty() {
        cur = latest(&adj.preds[cur]);
        chain.push(cur);
    }
    chain.reverse();
    Path::new(chain)
}

/// One bound violation found by [`perturb_and_check`].
#[derive(Debug, Clone)]
pub struct PerturbViolation {
    pub trial: usize,
    pub mode: Mode,
    pub processors: usize,
    pub makespan: Time,
    pub bound: Time,
}

/// Outcome of a perturbation campaign.
#[derive(Debug, Clone)]
pub struct PerturbReport {
    pub trials: usize,
    pub checks: usize,
    pub violations: Vec<PerturbViolation>,
}

/// Sustainability check: for `trials` random perturbations (per-vertex
/// execution times drawn uniformly from `[0, wcet]`, processor counts
/// `m' >= m`), simulates the job and asserts the makespan stays below the
/// bounds computed with the *original* wcets and processor count.
pub fn perturb_and_check(
    task: &DagTask,
    collection: &PathCollection,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<PerturbReport> {
    let bound_pre = bound_preemptive(task, collection, m)?;
    let bound_np = if collection.n() < m {
        Some(bound_nonpreemptive(task, collection, m)?)
    } else {
        None
    };
    let priorities = PriorityAssignment::two_level(task, collection);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = PerturbReport {
        trials,
        checks: 0,
        violations: Vec::new(),
    };
    for trial in 0..trials {
        let exec: Vec<Time> = task
            .wcets()
            .iter()
            .map(|&w| time(rng.gen_range(0..=w)))
            .collect();
        let m_used = m + rng.gen_range(0..=10usize);
        let trace =
            simulate_dedicated(task, &priorities, m_used, Mode::Preemptive, Some(&exec))?;
        report.checks += 1;
        if trace.makespan > bound_pre {
            report.violations.push(PerturbViolation {
                trial,
                mode: Mode::Preemptive,
                processors: m_used,
                makespan: trace.makespan,
                bound: bound_pre,
            });
        }
        if let Some(bound) = bound_np {
            let trace =
                simulate_dedicated(task, &priorities, m_used, Mode::NonPreemptive, Some(&exec))?;
            report.checks += 1;
            if trace.makespan > bound {
                report.violations.push(PerturbViolation {
                    trial,
                    mode: Mode::NonPreemptive,
                    processors: m_used,
                    makespan: trace.makespan,
                    bound,
                });
            }
        }
    }
    Ok(report)
}

/// Re-derives schedule-validity facts from a finished trace, independently
/// of the engine's internal state: interval ordering, per-vertex execution
/// totals, precedence, and work conservation. `supply` must be given for
/// reservation-mode traces.
pub fn verify_schedule(
    task: &DagTask,
    trace: &ScheduleTrace,
    exec_times: Option<&[Time]>,
    supply: Option<&SupplyTrace>,
) -> std::result::Result<(), String> {
    let exec = resolve_exec_times(task, exec_times);
    let n = task.vertex_count();
    let adj = task.adjacency();

    // Touching windows deliver continuous service, so containment is
    // checked against the coalesced window list.
    let merged_supply: Option<Vec<Vec<(Time, Time)>>> = supply.map(|s| {
        s.windows
            .iter()
            .map(|list| {
                let mut merged: Vec<(Time, Time)> = Vec::new();
                for &(start, end) in list {
                    match merged.last_mut() {
                        Some(prev) if prev.1 == start => prev.1 = end,
                        _ => merged.push((start, end)),
                    }
                }
                merged
            })
            .collect()
    });

    let mut executed = vec![Time::zero(); n];
    for (p, list) in trace.processors.iter().enumerate() {
        let mut prev_end = Time::zero();
        for iv in list {
            if iv.start < prev_end {
                return Err(format!("processor {} intervals overlap", p));
            }
            if iv.start >= iv.end {
                return Err(format!("processor {} has an empty interval", p));
            }
            prev_end = iv.end;
            executed[iv.vertex] += iv.end - iv.start;
            let arrival = trace.arrival[iv.vertex]
                .ok_or_else(|| format!("vertex {} executes but never arrived", iv.vertex))?;
            if iv.start < arrival {
                return Err(format!("vertex {} executes before arrival", iv.vertex));
            }
            if let Some(merged) = &merged_supply {
                let inside = merged[p]
                    .iter()
                    .any(|&(s, e)| s <= iv.start && iv.end <= e);
                if !inside {
                    return Err(format!(
                        "vertex {} executes outside reservation {}'s service",
                        iv.vertex, p
                    ));
                }
            }
        }
    }

    if trace.completed {
        for v in 0..n {
            if executed[v] != exec[v] {
                return Err(format!(
                    "vertex {} executed {} of {}",
                    v, executed[v], exec[v]
                ));
            }
            let arrival = trace.arrival[v].ok_or(format!("vertex {} never arrived", v))?;
            let expected = adj.preds[v]
                .iter()
                .map(|&u| trace.finish[u].expect("completed trace"))
                .max()
                .unwrap_or_else(Time::zero);
            if arrival != expected {
                return Err(format!("vertex {} arrival mismatch", v));
            }
        }
    }

    // Work conservation: between consecutive events, a waiting pending
    // subjob implies every in-service slot is busy.
    let mut events: Vec<Time> = Vec::new();
    for list in &trace.processors {
        for iv in list {
            events.push(iv.start);
            events.push(iv.end);
        }
    }
    for v in 0..n {
        if let Some(a) = trace.arrival[v] {
            events.push(a);
        }
        if let Some(f) = trace.finish[v] {
            events.push(f);
        }
    }
    if let Some(supply) = supply {
        for list in &supply.windows {
            for &(s, e) in list {
                events.push(s);
                events.push(e);
            }
        }
    }
    events.sort();
    events.dedup();
    for pair in events.windows(2) {
        let mid = (pair[0] + pair[1]) / Time::from_integer(2);
        let running: Vec<VertexId> = trace
            .processors
            .iter()
            .flatten()
            .filter(|iv| iv.start <= mid && mid < iv.end)
            .map(|iv| iv.vertex)
            .collect();
        let open = match supply {
            None => trace.processors.len(),
            Some(supply) => supply
                .windows
                .iter()
                .filter(|list| list.iter().any(|&(s, e)| s <= mid && mid < e))
                .count(),
        };
        let waiting = (0..n).any(|v| {
            matches!((trace.arrival[v], trace.finish[v]),
                (Some(a), Some(f)) if a <= mid && mid < f)
                && !running.contains(&v)
        });
        if waiting && running.len() != open {
            return Err(format!(
                "work conservation violated at {}: {} of {} slots busy with work waiting",
                mid,
                running.len(),
                open
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reservation::{GangReservation, OrdinaryReservation};
    use crate::task::fixtures::worked_example;
    use crate::time::frac;

    fn fig3_collection(task: &DagTask) -> PathCollection {
        PathCollection::new(
            task,
            vec![
                Path::new(vec![0, 6, 4, 5]),
                Path::new(vec![0, 6, 7]),
                Path::new(vec![0, 1, 2]),
            ],
        )
    }

    #[test]
    fn two_level_assignment_is_parallel_path_progression() {
        let task = worked_example();
        let coll = fig3_collection(&task);
        let prio = PriorityAssignment::two_level(&task, &coll);
        assert!(prio.is_parallel_path_progression(&coll));
        assert_eq!(prio.priority(0), 1);
        assert_eq!(prio.priority(3), 2); // v4 is uncovered
        let flat = PriorityAssignment::new(vec![1; 9]);
        assert!(!flat.is_parallel_path_progression(&coll));
    }

    #[test]
    fn dedicated_schedule_of_worked_example() {
        let task = worked_example();
        let coll = fig3_collection(&task);
        let prio = PriorityAssignment::two_level(&task, &coll);
        let trace = simulate_dedicated(&task, &prio, 3, Mode::Preemptive, None).unwrap();
        assert!(trace.completed);
        assert_eq!(trace.makespan, time(10));
        assert_eq!(trace.envelope.vertices(), &[0, 6, 4, 5]);
        assert_eq!(trace.preemptions, 0);
        assert_eq!(trace.busy_time, time(10));
        assert_eq!(trace.nonbusy_time, time(0));
        verify_schedule(&task, &trace, None, None).unwrap();
    }

    #[test]
    fn single_vertex_and_chain() {
        let single = DagTask::new(vec![7], vec![]);
        let prio = PriorityAssignment::new(vec![1]);
        let trace = simulate_dedicated(&single, &prio, 1, Mode::Preemptive, None).unwrap();
        assert_eq!(trace.makespan, time(7));

        let chain = DagTask::new(vec![2, 3, 4], vec![(0, 1), (1, 2)]);
        for m in [1, 2, 5] {
            for mode in [Mode::Preemptive, Mode::NonPreemptive] {
                let prio = PriorityAssignment::new(vec![1, 2, 1]);
                let trace = simulate_dedicated(&chain, &prio, m, mode, None).unwrap();
                assert_eq!(trace.makespan, time(9));
                assert_eq!(trace.envelope.vertices(), &[0, 1, 2]);
            }
        }
    }

    #[test]
    fn zero_execution_times_finish_instantly() {
        let task = worked_example();
        let coll = fig3_collection(&task);
        let prio = PriorityAssignment::two_level(&task, &coll);
        let zeros = vec![Time::zero(); 9];
        let trace =
            simulate_dedicated(&task, &prio, 3, Mode::Preemptive, Some(&zeros)).unwrap();
        assert!(trace.completed);
        assert_eq!(trace.makespan, time(0));
    }

    #[test]
    fn envelope_of_independent_vertices() {
        let task = DagTask::new(vec![3, 5], vec![]);
        let prio = PriorityAssignment::new(vec![1, 1]);
        let trace = simulate_dedicated(&task, &prio, 2, Mode::Preemptive, None).unwrap();
        assert_eq!(trace.envelope.vertices(), &[1]);
    }

    #[test]
    fn preemption_counting() {
        // A fork releases two high-priority subjobs at once while a long
        // low-priority subjob occupies the second processor: one of the
        // forked subjobs must preempt it.
        let task = DagTask::new(vec![2, 3, 3, 10], vec![(0, 1), (0, 2)]);
        let prio = PriorityAssignment::new(vec![9, 9, 9, 1]);
        let trace = simulate_dedicated(&task, &prio, 2, Mode::Preemptive, None).unwrap();
        assert_eq!(trace.preemptions, 1);
        assert_eq!(trace.makespan, time(13));
        verify_schedule(&task, &trace, None, None).unwrap();
        // Non-preemptive: the long subjob runs to completion once started.
        let trace = simulate_dedicated(&task, &prio, 2, Mode::NonPreemptive, None).unwrap();
        assert_eq!(trace.preemptions, 0);
        assert_eq!(trace.makespan, time(10));
        verify_schedule(&task, &trace, None, None).unwrap();
    }

    #[test]
    fn supply_latest_gang_completes_by_deadline() {
        let task = worked_example().with_deadline(16, 16);
        let provision = crate::reservation::provision_gang(&task, 2).unwrap().unwrap();
        let res = Reservation::Gang(provision.reservation.clone());
        let prio = PriorityAssignment::two_level(&task, &provision.collection);
        for preset in [
            SupplyPreset::Latest,
            SupplyPreset::Fragmented,
            SupplyPreset::Random(7),
        ] {
            let supply = adversarial_supply(&res, preset);
            supply.validate(&res).unwrap();
            let trace = simulate_supply(&task, &prio, &res, &supply).unwrap();
            assert!(trace.completed, "{:?}", preset);
            assert!(trace.makespan <= time(16), "{:?}", preset);
            verify_schedule(&task, &trace, None, Some(&supply)).unwrap();
        }
    }

    #[test]
    fn supply_ordinary_halves_budgets_complete_by_deadline() {
        let task = worked_example().with_deadline(16, 16);
        let res = Reservation::Ordinary(OrdinaryReservation {
            m: 4,
            budgets: vec![frac(27, 2); 4],
            deadline: 16,
            period: 16,
            n: 3,
        });
        let prefix = crate::reservation::CoveragePrefix::compute(&task, 4).unwrap();
        let coll = prefix.collection(&task, 3);
        let prio = PriorityAssignment::two_level(&task, &coll);
        for preset in [
            SupplyPreset::Latest,
            SupplyPreset::Fragmented,
            SupplyPreset::Random(11),
        ] {
            let supply = adversarial_supply(&res, preset);
            supply.validate(&res).unwrap();
            let trace = simulate_supply(&task, &prio, &res, &supply).unwrap();
            assert!(trace.completed, "{:?}", preset);
            assert!(trace.makespan <= time(16), "{:?}", preset);
        }
    }

    #[test]
    fn full_supply_matches_dedicated() {
        let task = worked_example().with_deadline(16, 16);
        let coll = fig3_collection(&task);
        let prio = PriorityAssignment::two_level(&task, &coll);
        let res = Reservation::Gang(GangReservation {
            m: 3,
            budget: time(16),
            deadline: 16,
            period: 16,
            n: 3,
        });
        let supply = SupplyTrace::full(3, 16);
        supply.validate(&res).unwrap();
        let supplied = simulate_supply(&task, &prio, &res, &supply).unwrap();
        let dedicated = simulate_dedicated(&task, &prio, 3, Mode::Preemptive, None).unwrap();
        assert_eq!(supplied.makespan, dedicated.makespan);
    }

    #[test]
    fn latest_preset_window_shapes() {
        let gang = Reservation::Gang(GangReservation {
            m: 2,
            budget: time(14),
            deadline: 16,
            period: 16,
            n: 2,
        });
        let supply = adversarial_supply(&gang, SupplyPreset::Latest);
        assert_eq!(supply.windows, vec![vec![(time(2), time(16))]; 2]);

        let ordinary = Reservation::Ordinary(OrdinaryReservation {
            m: 1,
            budgets: vec![frac(27, 2)],
            deadline: 16,
            period: 16,
            n: 1,
        });
        let supply = adversarial_supply(&ordinary, SupplyPreset::Latest);
        assert_eq!(supply.windows, vec![vec![(frac(5, 2), time(16))]]);
    }

    #[test]
    fn random_supply_is_deterministic() {
        let res = Reservation::Ordinary(OrdinaryReservation {
            m: 3,
            budgets: vec![frac(27, 2); 3],
            deadline: 16,
            period: 16,
            n: 2,
        });
        let a = adversarial_supply(&res, SupplyPreset::Random(42));
        let b = adversarial_supply(&res, SupplyPreset::Random(42));
        assert_eq!(a, b);
        a.validate(&res).unwrap();
        let c = adversarial_supply(&res, SupplyPreset::Random(43));
        assert_ne!(a, c);
        c.validate(&res).unwrap();
    }

    #[test]
    fn supply_validation_rejects_mismatches() {
        let res = Reservation::Gang(GangReservation {
            m: 2,
            budget: time(14),
            deadline: 16,
            period: 16,
            n: 2,
        });
        let short = SupplyTrace {
            windows: vec![vec![(time(0), time(14))]],
        };
        assert!(matches!(
            short.validate(&res),
            Err(Error::SupplyBudgetMismatch(_))
        ));
        let uneven = SupplyTrace {
            windows: vec![
                vec![(time(0), time(14))],
                vec![(time(2), time(16))],
            ],
        };
        assert!(matches!(
            uneven.validate(&res),
            Err(Error::SupplyBudgetMismatch(_))
        ));
    }

    #[test]
    fn simulated_makespan_respects_bounds_on_worked_example() {
        let task = worked_example();
        let coll = fig3_collection(&task);
        let prio = PriorityAssignment::two_level(&task, &coll);
        let pre = simulate_dedicated(&task, &prio, 3, Mode::Preemptive, None).unwrap();
        assert!(pre.makespan <= bound_preemptive(&task, &coll, 3).unwrap());
        let two = PathCollection::new(
            &task,
            vec![Path::new(vec![0, 6, 4, 5]), Path::new(vec![0, 1, 2])],
        );
        let prio2 = PriorityAssignment::two_level(&task, &two);
        let np = simulate_dedicated(&task, &prio2, 3, Mode::NonPreemptive, None).unwrap();
        assert!(np.makespan <= bound_nonpreemptive(&task, &two, 3).unwrap());
    }

    #[test]
    fn pending_collection_subjobs_never_exceed_n() {
        let task = worked_example();
        let coll = fig3_collection(&task);
        let prio = PriorityAssignment::two_level(&task, &coll);
        let trace = simulate_dedicated(&task, &prio, 3, Mode::Preemptive, None).unwrap();
        let covered: Vec<bool> = task.vertices().map(|v| coll.is_covered(v)).collect();
        assert!(trace.max_concurrent_pending(&covered) <= coll.n());
    }

    #[test]
    fn perturbations_never_violate_bounds() {
        let task = worked_example();
        let coll = fig3_collection(&task);
        let report = perturb_and_check(&task, &coll, 3, 50, 1).unwrap();
        assert_eq!(report.trials, 50);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn envelope_chain_is_contiguous() {
        let task = worked_example();
        let coll = fig3_collection(&task);
        let prio = PriorityAssignment::two_level(&task, &coll);
        let trace = simulate_dedicated(&task, &prio, 2, Mode::Preemptive, None).unwrap();
        let env = trace.envelope.vertices();
        assert_eq!(trace.arrival[env[0]], Some(time(0)));
        for w in env.windows(2) {
            assert_eq!(trace.finish[w[0]], trace.arrival[w[1]]);
        }
        assert_eq!(trace.finish[*env.last().unwrap()], Some(trace.makespan));
    }

    #[test]
    fn identical_seeds_reproduce_traces() {
        let task = worked_example();
        let coll = fig3_collection(&task);
        let res = Reservation::Gang(GangReservation {
            m: 2,
            budget: time(14),
            deadline: 16,
            period: 16,
            n: 2,
        });
        let prio = PriorityAssignment::two_level(&task, &coll);
        let s1 = adversarial_supply(&res, SupplyPreset::Random(5));
        let s2 = adversarial_supply(&res, SupplyPreset::Random(5));
        let t1 = simulate_supply(&task, &prio, &res, &s1).unwrap();
        let t2 = simulate_supply(&task, &prio, &res, &s2).unwrap();
        assert_eq!(t1.processors, t2.processors);
        assert_eq!(t1.makespan, t2.makespan);
    }
}
