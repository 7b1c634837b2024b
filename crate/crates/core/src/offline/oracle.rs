use super::{SolverError, SolverQuery};
use crate::model::{Capacity, Request};

pub const BRUTE_FORCE_LIMIT: usize = 7;

/// Minimum duration over every precedence- and capacity-valid interleaving of
/// pickups and deliveries, each executed greedily. No pruning of any kind.
pub fn brute_force_solve(query: &SolverQuery) -> Result<f64, SolverError> {
    query.check()?;
    if query.requests.len() > BRUTE_FORCE_LIMIT {
        return Err(SolverError::TooLarge { size: query.requests.len(), limit: BRUTE_FORCE_LIMIT });
    }
    let mut walk = Walk {
        reqs: &query.requests,
        state: vec![Stage::Waiting; query.requests.len()],
        capacity: query.capacity,
        closed: query.variant.is_closed(),
        best: f64::INFINITY,
    };
    walk.extend(query.start_time, query.start_pos, 0, 0);
    Ok(walk.best - query.start_time)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stage {
    Waiting,
    Loaded,
    Done,
}

struct Walk<'a> {
    reqs: &'a [Request],
    state: Vec<Stage>,
    capacity: Capacity,
    closed: bool,
    best: f64,
}

impl Walk<'_> {
    fn extend(&mut self, time: f64, pos: f64, load: usize, done: usize) {
        if done == self.reqs.len() {
            let finish = if self.closed { time + pos.abs() } else { time };
            self.best = self.best.min(finish);
            return;
        }
        let overloaded = match self.capacity {
            Capacity::Finite(c) => load > c,
            Capacity::Unbounded => false,
        };
        for i in 0..self.reqs.len() {
            let q = self.reqs[i];
            let (target, next_time) = match self.state[i] {
                Stage::Waiting => (q.a, f64::max(time + (q.a - pos).abs(), q.r)),
                Stage::Loaded => (q.b, time + (q.b - pos).abs()),
                Stage::Done => continue,
            };
            // An overloaded server cannot let time pass.
            if overloaded && next_time > time {
                continue;
            }
            let before = self.state[i];
            if before == Stage::Waiting {
                self.state[i] = Stage::Loaded;
                self.extend(next_time, target, load + 1, done);
            } else {
                self.state[i] = Stage::Done;
                self.extend(next_time, target, load - 1, done + 1);
            }
            self.state[i] = before;
        }
    }
}
