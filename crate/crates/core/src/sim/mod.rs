//! Event-driven online simulation with per-schedule bookkeeping.

mod trace;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algorithms::{AlgorithmError, AlgorithmSpec, Decision, DecisionView, OnlineAlgorithm};
use crate::model::{validate, Instance, Request, Segment, Trajectory, Variant, Violation};
use crate::offline::{opt, SolverConfig, SolverError};

pub use trace::{check_trace, Lemma, LemmaViolation};

/// How a schedule came to start.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    /// Right when the server became free (or at time zero).
    Immediate,
    /// The server was idle and a release triggered the start.
    OnRelease,
    /// After a deliberate wait that ran to its end.
    AfterWait,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRecord {
    /// 1-based schedule number `j`.
    pub index: usize,
    pub start_time: f64,
    pub start_pos: f64,
    pub end_pos: f64,
    pub served: Vec<usize>,
    pub length: f64,
    pub start_kind: StartKind,
    /// Time the server became free before this schedule.
    pub idle_since: f64,
}

impl ScheduleRecord {
    pub fn end_time(&self) -> f64 {
        self.start_time + self.length
    }

    pub fn waited(&self) -> bool {
        self.start_kind == StartKind::AfterWait
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub algorithm: String,
    pub variant: Variant,
    pub trajectory: Trajectory,
    pub schedules: Vec<ScheduleRecord>,
    pub cost: f64,
    pub opt_cost: f64,
    pub ratio: f64,
}

impl SimResult {
    pub fn last_schedule(&self) -> Option<&ScheduleRecord> {
        self.schedules.last()
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SimError {
    #[error("invalid instance: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidInstance(Vec<Violation>),
    #[error(transparent)]
    Algorithm(#[from] AlgorithmError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("algorithm broke the simulation protocol: {0}")]
    Protocol(String),
}

impl SimError {
    /// Whether the failure is a solver size limit rather than bad input or a bug.
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            SimError::Solver(SolverError::TooLarge { .. })
                | SimError::Algorithm(AlgorithmError::Solver(SolverError::TooLarge { .. }))
        )
    }
}

/// Builds the algorithm from its spec and simulates it.
pub fn run(instance: &Instance, spec: &AlgorithmSpec, config: &SolverConfig) -> Result<SimResult, SimError> {
    let mut algorithm = spec.build()?;
    simulate(instance, algorithm.as_mut(), config)
}

/// Reveals requests at their release times and executes the algorithm's decisions.
///
/// Releases at equal times are delivered in id order before the algorithm decides.
/// Requests released while a schedule runs are only seen once it completes.
pub fn simulate(instance: &Instance, algorithm: &mut dyn OnlineAlgorithm, config: &SolverConfig) -> Result<SimResult, SimError> {
    let violations = validate(instance);
    if !violations.is_empty() {
        return Err(SimError::InvalidInstance(violations));
    }
    let tol = config.tolerance;
    let mut order: Vec<&Request> = instance.requests.iter().collect();
    order.sort_by(|x, y| x.r.total_cmp(&y.r).then(x.id.cmp(&y.id)));

    let mut next = 0;
    let mut now = 0.0_f64;
    let mut pos = 0.0_f64;
    let mut idle_since = 0.0_f64;
    let mut timer_fired = false;
    let mut pending: Vec<Request> = Vec::new();
    let mut served = vec![false; instance.len()];
    let mut segments: Vec<Segment> = Vec::new();
    let mut events = Vec::with_capacity(2 * instance.len());
    let mut schedules: Vec<ScheduleRecord> = Vec::new();

    loop {
        while next < order.len() && order[next].r <= now {
            let q = *order[next];
            pending.push(q);
            algorithm.on_release(q.r, &q);
            next += 1;
        }
        if pending.is_empty() {
            match order.get(next) {
                None => break,
                Some(q) => {
                    now = q.r;
                    timer_fired = false;
                    continue;
                }
            }
        }
        let view = DecisionView {
            now,
            position: pos,
            pending: &pending,
            capacity: instance.capacity,
            variant: instance.variant,
            solver: config,
        };
        match algorithm.next_decision(&view)? {
            Decision::Start(schedule) => {
                if (schedule.start_time - now).abs() > tol || (schedule.start_pos - pos).abs() > tol {
                    return Err(SimError::Protocol(format!(
                        "schedule starts at ({}, {}) but the server is at ({now}, {pos})",
                        schedule.start_time, schedule.start_pos
                    )));
                }
                let mut ids = schedule.served();
                ids.sort_unstable();
                let mut expected: Vec<usize> = pending.iter().map(|q| q.id).collect();
                expected.sort_unstable();
                if ids != expected {
                    return Err(SimError::Protocol(format!("schedule serves {ids:?}, pending {expected:?}")));
                }
                let start_kind = if timer_fired {
                    StartKind::AfterWait
                } else if now > idle_since {
                    StartKind::OnRelease
                } else {
                    StartKind::Immediate
                };
                if now > idle_since {
                    segments.push(Segment { start_time: idle_since, start_pos: pos, end_time: now, end_pos: pos });
                }
                segments.extend_from_slice(&schedule.trajectory.segments);
                events.extend_from_slice(&schedule.trajectory.events);
                for id in &ids {
                    served[*id] = true;
                }
                let end = schedule.completion_time();
                schedules.push(ScheduleRecord {
                    index: schedules.len() + 1,
                    start_time: now,
                    start_pos: pos,
                    end_pos: schedule.end_pos,
                    served: ids,
                    length: schedule.length,
                    start_kind,
                    idle_since,
                });
                now = end;
                pos = schedule.end_pos;
                idle_since = end;
                timer_fired = false;
                pending.clear();
            }
            Decision::WaitUntil(t) => {
                if t.is_nan() || t <= now {
                    return Err(SimError::Protocol(format!("wait until {t} at time {now}")));
                }
                match order.get(next) {
                    Some(q) if q.r < t => {
                        now = q.r;
                        timer_fired = false;
                    }
                    _ => {
                        now = t;
                        timer_fired = true;
                    }
                }
            }
            Decision::Idle => match order.get(next) {
                Some(q) => {
                    now = q.r;
                    timer_fired = false;
                }
                None => return Err(SimError::Protocol("idle while requests are pending".into())),
            },
        }
    }
    debug_assert!(served.iter().all(|&s| s));

    // Completion of the last schedule; zero when nothing was ever scheduled.
    let cost = idle_since;
    let opt_cost = opt(instance, config)?.length;
    let ratio = if opt_cost > 0.0 {
        cost / opt_cost
    } else if cost > tol {
        f64::INFINITY
    } else {
        1.0
    };
    Ok(SimResult {
        algorithm: algorithm.name(),
        variant: instance.variant,
        trajectory: Trajectory { segments, events, cost },
        schedules,
        cost,
        opt_cost,
        ratio,
    })
}
