//! Exact offline schedules: `L(t, p, R)` by branch-and-bound, a brute-force oracle, and `Opt`.

mod core;
mod oracle;
mod search;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Action, ActionKind, Capacity, Event, Instance, Request, Segment, Trajectory, Variant, DEFAULT_TOLERANCE};

pub use self::core::solve_by_refinement;
pub use oracle::{brute_force_solve, BRUTE_FORCE_LIMIT};
pub use search::{solve, solve_with_stats, SolveStats};

/// Hard ceiling imposed by the bitset state representation.
pub const MAX_SEARCH_REQUESTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Largest request set `solve` accepts.
    pub max_requests: usize,
    /// Memoize the earliest arrival per (served sets, position) and prune later arrivals.
    pub dominance: bool,
    pub tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { max_requests: 12, dominance: false, tolerance: DEFAULT_TOLERANCE }
    }
}

impl SolverConfig {
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverQuery {
    pub start_time: f64,
    pub start_pos: f64,
    pub requests: Vec<Request>,
    pub capacity: Capacity,
    pub variant: Variant,
}

impl SolverQuery {
    pub fn new(start_time: f64, start_pos: f64, requests: Vec<Request>, capacity: Capacity, variant: Variant) -> Self {
        Self { start_time, start_pos, requests, capacity, variant }
    }

    /// The query behind `Opt(σ) = L(0, 0, σ)`.
    pub fn for_instance(instance: &Instance) -> Self {
        Self::new(0.0, 0.0, instance.requests.clone(), instance.capacity, instance.variant)
    }

    pub fn at(&self, start_time: f64, start_pos: f64) -> Self {
        Self { start_time, start_pos, ..self.clone() }
    }

    fn check(&self) -> Result<(), SolverError> {
        let finite = self.start_time.is_finite()
            && self.start_pos.is_finite()
            && self.requests.iter().all(|q| q.a.is_finite() && q.b.is_finite() && q.r.is_finite());
        if !finite {
            return Err(SolverError::InvalidQuery("non-finite value".into()));
        }
        if self.start_time < 0.0 {
            return Err(SolverError::InvalidQuery(format!("negative start time {}", self.start_time)));
        }
        if self.capacity == Capacity::Finite(0) {
            return Err(SolverError::InvalidQuery("zero capacity".into()));
        }
        let mut ids: Vec<usize> = self.requests.iter().map(|q| q.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(SolverError::InvalidQuery("duplicate request id".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolvedSchedule {
    pub start_time: f64,
    pub start_pos: f64,
    /// Duration; the schedule completes at `start_time + length`.
    pub length: f64,
    pub actions: Vec<Action>,
    pub end_pos: f64,
    /// Absolute-time path from `(start_time, start_pos)`; its cost is the completion time.
    pub trajectory: Trajectory,
}

impl SolvedSchedule {
    pub fn completion_time(&self) -> f64 {
        self.trajectory.end().map_or(self.start_time, |(t, _)| t)
    }

    pub fn served(&self) -> Vec<usize> {
        self.actions.iter().filter(|a| a.kind == ActionKind::Pickup).map(|a| a.request).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("instance too large for exact solve: {size} requests, limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("invalid solver query: {0}")]
    InvalidQuery(String),
}

/// Runs `actions` greedily from the query's start: move straight to each action's
/// position and wait there if a pickup is not yet released. Closed queries end with
/// the return to the origin. Every solver result is produced through this function.
pub fn execute(query: &SolverQuery, actions: &[Action]) -> SolvedSchedule {
    let lookup = |id: usize| query.requests.iter().find(|q| q.id == id).expect("action refers to a query request");
    let mut time = query.start_time;
    let mut pos = query.start_pos;
    let mut segments = Vec::new();
    let mut events = Vec::with_capacity(actions.len());
    let travel = |time: &mut f64, pos: &mut f64, target: f64, segments: &mut Vec<Segment>| {
        let d = (target - *pos).abs();
        if d > 0.0 {
            let end = *time + d;
            segments.push(Segment { start_time: *time, start_pos: *pos, end_time: end, end_pos: target });
            *time = end;
            *pos = target;
        }
    };
    for action in actions {
        let q = lookup(action.request);
        match action.kind {
            ActionKind::Pickup => {
                travel(&mut time, &mut pos, q.a, &mut segments);
                if time < q.r {
                    segments.push(Segment { start_time: time, start_pos: pos, end_time: q.r, end_pos: pos });
                    time = q.r;
                }
            }
            ActionKind::Delivery => travel(&mut time, &mut pos, q.b, &mut segments),
        }
        events.push(Event { time, request: action.request, kind: action.kind });
    }
    if query.variant.is_closed() {
        travel(&mut time, &mut pos, 0.0, &mut segments);
    }
    SolvedSchedule {
        start_time: query.start_time,
        start_pos: query.start_pos,
        length: time - query.start_time,
        actions: actions.to_vec(),
        end_pos: pos,
        trajectory: Trajectory { segments, events, cost: time },
    }
}

/// `Opt(σ) = L(0, 0, σ)`. Small instances go straight to the exact search; larger ones
/// are solved exactly by core refinement over their point requests.
pub fn opt(instance: &Instance, config: &SolverConfig) -> Result<SolvedSchedule, SolverError> {
    let query = SolverQuery::for_instance(instance);
    if instance.len() <= config.max_requests {
        solve(&query, config)
    } else {
        solve_by_refinement(&query, config)
    }
}
