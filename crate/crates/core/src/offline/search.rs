use std::collections::HashMap;

use super::{execute, SolvedSchedule, SolverConfig, SolverError, SolverQuery, MAX_SEARCH_REQUESTS};
use crate::model::{Action, Capacity, Request};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes: u64,
    pub pruned: u64,
}

/// Shortest schedule for the query, ties broken towards the lexicographically
/// smallest action sequence (Pickup before Delivery, then by request id).
pub fn solve(query: &SolverQuery, config: &SolverConfig) -> Result<SolvedSchedule, SolverError> {
    solve_with_stats(query, config).map(|(s, _)| s)
}

pub fn solve_with_stats(query: &SolverQuery, config: &SolverConfig) -> Result<(SolvedSchedule, SolveStats), SolverError> {
    query.check()?;
    let n = query.requests.len();
    let limit = config.max_requests.min(MAX_SEARCH_REQUESTS);
    if n > limit {
        return Err(SolverError::TooLarge { size: n, limit });
    }
    let mut reqs = query.requests.clone();
    reqs.sort_by_key(|q| q.id);
    let mut search = Search {
        reqs: &reqs,
        full: if n == 64 { u64::MAX } else { (1u64 << n) - 1 },
        capacity: query.capacity,
        closed: query.variant.is_closed(),
        t0: query.start_time,
        tol: config.tolerance,
        best: f64::INFINITY,
        best_seq: Vec::new(),
        seq: Vec::with_capacity(2 * n),
        memo: config.dominance.then(HashMap::new),
        stats: SolveStats::default(),
    };
    let root = Node { time: query.start_time, pos: query.start_pos, picked: 0, delivered: 0, load: 0 };
    search.dfs(root);
    let actions: Vec<Action> = search.best_seq.iter().map(|&(kind, idx)| Action { kind, request: reqs[idx].id }).collect();
    let stats = search.stats;
    Ok((execute(query, &actions), stats))
}

#[derive(Clone, Copy)]
struct Node {
    time: f64,
    pos: f64,
    picked: u64,
    delivered: u64,
    load: usize,
}

struct Search<'a> {
    reqs: &'a [Request],
    full: u64,
    capacity: Capacity,
    closed: bool,
    t0: f64,
    tol: f64,
    best: f64,
    best_seq: Vec<(crate::model::ActionKind, usize)>,
    seq: Vec<(crate::model::ActionKind, usize)>,
    memo: Option<HashMap<(u64, u64, u64), f64>>,
    stats: SolveStats,
}

impl Search<'_> {
    fn dfs(&mut self, node: Node) {
        use crate::model::ActionKind::{Delivery, Pickup};
        self.stats.nodes += 1;
        if node.delivered == self.full {
            let finish = if self.closed { node.time + node.pos.abs() } else { node.time };
            let len = finish - self.t0;
            if self.best.is_infinite() || len < self.best - self.tol {
                self.best = len;
                self.best_seq.clone_from(&self.seq);
            }
            return;
        }
        if self.best.is_finite() && self.lower_bound(&node) >= self.best - self.tol {
            self.stats.pruned += 1;
            return;
        }
        if let Some(memo) = &mut self.memo {
            let key = (node.picked, node.delivered, node.pos.to_bits());
            match memo.get(&key) {
                Some(&t) if t <= node.time => {
                    self.stats.pruned += 1;
                    return;
                }
                _ => {
                    memo.insert(key, node.time);
                }
            }
        }
        // Time may only pass while the load fits.
        let may_travel = self.capacity.admits(node.load);
        for (k, q) in self.reqs.iter().enumerate() {
            let bit = 1u64 << k;
            if node.picked & bit != 0 {
                continue;
            }
            let arrival = (node.time + (node.pos - q.a).abs()).max(q.r);
            if arrival > node.time && !may_travel {
                continue;
            }
            let mut child = Node { time: arrival, pos: q.a, picked: node.picked | bit, ..node };
            if q.is_point() {
                // Delivering a point request right away never hurts.
                child.delivered |= bit;
                self.seq.extend([(Pickup, k), (Delivery, k)]);
                self.dfs(child);
                self.seq.truncate(self.seq.len() - 2);
            } else {
                child.load += 1;
                self.seq.push((Pickup, k));
                self.dfs(child);
                self.seq.pop();
            }
        }
        for (k, q) in self.reqs.iter().enumerate() {
            let bit = 1u64 << k;
            if node.picked & bit == 0 || node.delivered & bit != 0 {
                continue;
            }
            let arrival = node.time + (node.pos - q.b).abs();
            if arrival > node.time && !may_travel {
                continue;
            }
            let child = Node { time: arrival, pos: q.b, delivered: node.delivered | bit, load: node.load - 1, ..node };
            self.seq.push((Delivery, k));
            self.dfs(child);
            self.seq.pop();
        }
    }

    /// Admissible bound on the remaining length, measured from the query start.
    fn lower_bound(&self, node: &Node) -> f64 {
        let home = |x: f64| if self.closed { x.abs() } else { 0.0 };
        let mut finish = node.time + home(node.pos);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (k, q) in self.reqs.iter().enumerate() {
            let bit = 1u64 << k;
            if node.delivered & bit != 0 {
                continue;
            }
            let done = if node.picked & bit == 0 {
                lo = lo.min(q.a.min(q.b));
                hi = hi.max(q.a.max(q.b));
                (node.time + (node.pos - q.a).abs()).max(q.r) + q.span()
            } else {
                lo = lo.min(q.b);
                hi = hi.max(q.b);
                node.time + (node.pos - q.b).abs()
            };
            finish = finish.max(done + home(q.b));
        }
        if lo <= hi {
            let sweep = if self.closed {
                let (lo, hi) = (lo.min(0.0), hi.max(0.0));
                ((node.pos - lo).abs() + (hi - lo) + hi.abs()).min((node.pos - hi).abs() + (hi - lo) + lo.abs())
            } else {
                (node.pos - lo).abs().min((node.pos - hi).abs()) + (hi - lo)
            };
            finish = finish.max(node.time + sweep);
        }
        finish - self.t0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ActionKind, Variant};

    fn query(t: f64, p: f64, triples: &[(f64, f64, f64)], c: Capacity, v: Variant) -> SolverQuery {
        let reqs = triples.iter().enumerate().map(|(i, &(a, b, r))| Request::new(i, a, b, r)).collect();
        SolverQuery::new(t, p, reqs, c, v)
    }

    const C1: Capacity = Capacity::Finite(1);

    #[test]
    fn single_point_request() {
        let s = solve(&query(0.0, 0.0, &[(1.0, 1.0, 0.0)], C1, Variant::Open), &SolverConfig::default()).unwrap();
        assert_eq!(s.length, 1.0);
        assert_eq!(s.end_pos, 1.0);
        assert_eq!(s.actions, vec![Action::pickup(0), Action::delivery(0)]);
    }

    #[test]
    fn closed_single_point_request() {
        let s = solve(&query(0.0, 0.0, &[(0.5, 0.5, 0.0)], C1, Variant::Closed), &SolverConfig::default()).unwrap();
        assert_eq!(s.length, 1.0);
        assert_eq!(s.end_pos, 0.0);
    }

    #[test]
    fn waiting_pair_from_position_one() {
        // Θ = 2.2, ε' = 0.01: from 1, fetch the left request, then the right one.
        let theta = 2.2;
        let e = 0.01;
        let r = 1.0 / theta + e;
        let pair = [(-1.0 / theta + e, 0.0, r), (1.0 / theta, 1.0, r)];
        let s = solve(&query(1.0 + e / 2.0, 1.0, &pair, C1, Variant::Open), &SolverConfig::default()).unwrap();
        assert!((s.length - (2.0 + 2.0 / theta - 2.0 * e)).abs() < 1e-12);
        assert_eq!(s.end_pos, 1.0);
    }

    #[test]
    fn ties_resolve_to_smallest_sequence() {
        // Both orders cost 3; the one starting with P0 wins.
        let s =
            solve(&query(0.0, 0.0, &[(1.0, 1.0, 0.0), (-1.0, -1.0, 0.0)], C1, Variant::Open), &SolverConfig::default()).unwrap();
        assert_eq!(s.length, 3.0);
        assert_eq!(s.actions[0], Action::pickup(0));
        let s =
            solve(&query(0.0, 0.0, &[(-1.0, -1.0, 0.0), (1.0, 1.0, 0.0)], C1, Variant::Open), &SolverConfig::default()).unwrap();
        assert_eq!(s.actions[0], Action::pickup(0));
        assert_eq!(s.end_pos, 1.0);
    }

    #[test]
    fn capacity_forces_sequential_service() {
        let reqs = [(0.0, 2.0, 0.0), (1.0, 3.0, 0.0)];
        let one = solve(&query(0.0, 0.0, &reqs, C1, Variant::Open), &SolverConfig::default()).unwrap();
        let two = solve(&query(0.0, 0.0, &reqs, Capacity::Finite(2), Variant::Open), &SolverConfig::default()).unwrap();
        assert_eq!(two.length, 3.0);
        assert_eq!(one.length, 5.0);
    }

    #[test]
    fn dominance_keeps_the_result() {
        let reqs = [(0.5, -1.0, 0.5), (-0.25, 1.5, 0.0), (1.0, 1.0, 2.0), (-2.0, 0.0, 1.0), (0.75, 0.25, 0.0)];
        for v in [Variant::Open, Variant::Closed] {
            for c in [C1, Capacity::Finite(2), Capacity::Unbounded] {
                let q = query(0.25, 0.5, &reqs, c, v);
                let plain = solve(&q, &SolverConfig::default()).unwrap();
                let memo = solve(&q, &SolverConfig { dominance: true, ..SolverConfig::default() }).unwrap();
                assert_eq!(plain, memo);
            }
        }
    }

    #[test]
    fn size_limit_is_enforced() {
        let reqs: Vec<_> = (0..13).map(|i| (i as f64, i as f64, 0.0)).collect();
        let err = solve(&query(0.0, 0.0, &reqs, C1, Variant::Open), &SolverConfig::default()).unwrap_err();
        assert_eq!(err, SolverError::TooLarge { size: 13, limit: 12 });
    }

    #[test]
    fn actions_are_well_formed() {
        let reqs = [(0.5, -1.0, 0.5), (-0.25, 1.5, 0.0), (1.0, 1.0, 2.0)];
        let s = solve(&query(0.0, 0.0, &reqs, Capacity::Finite(2), Variant::Open), &SolverConfig::default()).unwrap();
        for id in 0..3 {
            let p = s.actions.iter().position(|a| *a == Action::pickup(id)).unwrap();
            let d = s.actions.iter().position(|a| *a == Action::delivery(id)).unwrap();
            assert!(p < d);
        }
        assert_eq!(s.actions.iter().filter(|a| a.kind == ActionKind::Pickup).count(), 3);
    }
}
