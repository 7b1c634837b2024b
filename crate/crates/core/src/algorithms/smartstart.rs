use serde::{Deserialize, Serialize};

use super::{AlgorithmError, Decision, DecisionView, OnlineAlgorithm};
use crate::model::Action;
use crate::offline::{execute, solve, SolvedSchedule, SolverQuery};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmartstartConfig {
    pub theta: f64,
}

impl SmartstartConfig {
    pub fn new(theta: f64) -> Result<Self, AlgorithmError> {
        if theta.is_finite() && theta > 1.0 {
            Ok(Self { theta })
        } else {
            Err(AlgorithmError::BadTheta(theta))
        }
    }
}

/// Earliest start `max(now, L(now, p, R) / (Θ − 1))` together with the schedule for `R`.
///
/// Every request in `R` is released by `now`, so `L` does not change while waiting
/// and the value stays valid until the next release.
pub fn smartstart_next_start(
    view: &DecisionView<'_>,
    config: &SmartstartConfig,
) -> Result<(f64, SolvedSchedule), AlgorithmError> {
    if view.pending.is_empty() {
        return Err(AlgorithmError::NothingPending);
    }
    let query = SolverQuery::new(view.now, view.position, view.pending.to_vec(), view.capacity, view.variant);
    let schedule = solve(&query, view.solver)?;
    let start = view.now.max(schedule.length / (config.theta - 1.0));
    Ok((start, schedule))
}

#[derive(Clone, Debug)]
struct Plan {
    start: f64,
    actions: Vec<Action>,
}

/// Waits until `L / (Θ − 1)` before each schedule; releases are ignored while a schedule runs.
#[derive(Clone, Debug)]
pub struct Smartstart {
    config: SmartstartConfig,
    plan: Option<Plan>,
}

impl Smartstart {
    pub fn new(config: SmartstartConfig) -> Self {
        Self { config, plan: None }
    }

    pub fn config(&self) -> &SmartstartConfig {
        &self.config
    }
}

impl OnlineAlgorithm for Smartstart {
    fn name(&self) -> String {
        format!("smartstart:Θ={}", self.config.theta)
    }

    fn on_release(&mut self, _time: f64, _request: &crate::model::Request) {
        // A new request changes L, so the start time has to be recomputed.
        self.plan = None;
    }

    fn next_decision(&mut self, view: &DecisionView<'_>) -> Result<Decision, AlgorithmError> {
        if view.pending.is_empty() {
            return Ok(Decision::Idle);
        }
        if let Some(plan) = self.plan.take() {
            if view.now >= plan.start {
                let query = SolverQuery::new(view.now, view.position, view.pending.to_vec(), view.capacity, view.variant);
                return Ok(Decision::Start(execute(&query, &plan.actions)));
            }
        }
        let (start, schedule) = smartstart_next_start(view, &self.config)?;
        if start <= view.now {
            return Ok(Decision::Start(schedule));
        }
        self.plan = Some(Plan { start, actions: schedule.actions });
        Ok(Decision::WaitUntil(start))
    }
}
