use super::{AlgorithmError, Decision, DecisionView, OnlineAlgorithm};
use crate::offline::{solve, SolverQuery};

/// Starts an optimal schedule for everything pending as soon as it is idle.
#[derive(Clone, Copy, Debug, Default)]
pub struct Ignore;

impl OnlineAlgorithm for Ignore {
    fn name(&self) -> String {
        "ignore".to_string()
    }

    fn next_decision(&mut self, view: &DecisionView<'_>) -> Result<Decision, AlgorithmError> {
        if view.pending.is_empty() {
            return Ok(Decision::Idle);
        }
        let query = SolverQuery::new(view.now, view.position, view.pending.to_vec(), view.capacity, view.variant);
        Ok(Decision::Start(solve(&query, view.solver)?))
    }
}
