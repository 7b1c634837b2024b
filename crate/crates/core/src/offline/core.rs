//! Exact solving of request sets with many point requests.
//!
//! Any schedule for the full set is also a schedule for a subset, so the optimum
//! of a core subset is a lower bound. If the core's optimal path happens to pass
//! every other point request at or after its release, that path serves the full
//! set at the same length and is therefore optimal. Otherwise the missing request
//! with the latest release joins the core and the search repeats.

use super::{search::solve, SolvedSchedule, SolverConfig, SolverError, SolverQuery};
use crate::model::{Action, ActionKind, Event, Request, Trajectory};

pub fn solve_by_refinement(query: &SolverQuery, config: &SolverConfig) -> Result<SolvedSchedule, SolverError> {
    query.check()?;
    let tol = config.tolerance;
    let mut core: Vec<Request> = query.requests.iter().filter(|q| !q.is_point()).copied().collect();
    let mut outside: Vec<Request> = query.requests.iter().filter(|q| q.is_point()).copied().collect();
    outside.sort_by_key(|q| q.id);
    for pick in [extreme(&outside, |a, b| a < b), extreme(&outside, |a, b| a > b)].into_iter().flatten() {
        if let Some(i) = outside.iter().position(|q| q.id == pick) {
            core.push(outside.remove(i));
        }
    }
    loop {
        if core.len() > config.max_requests {
            return Err(SolverError::TooLarge { size: core.len(), limit: config.max_requests });
        }
        let sub = SolverQuery { requests: core.clone(), ..query.clone() };
        let schedule = solve(&sub, config)?;
        let mut absorbed = Vec::with_capacity(outside.len());
        let mut latest: Option<usize> = None;
        for (i, q) in outside.iter().enumerate() {
            match earliest_visit(&schedule, q, tol) {
                Some(t) => absorbed.push((t, q.id)),
                None => {
                    if latest.map_or(true, |j| q.r > outside[j].r) {
                        latest = Some(i);
                    }
                }
            }
        }
        match latest {
            Some(i) => core.push(outside.remove(i)),
            None => return Ok(merge(schedule, absorbed)),
        }
    }
}

/// First point request (by id) with the smallest position under `better`.
fn extreme(points: &[Request], better: impl Fn(f64, f64) -> bool) -> Option<usize> {
    points
        .iter()
        .fold(None::<&Request>, |acc, q| match acc {
            Some(b) if !better(q.a, b.a) => Some(b),
            _ => Some(q),
        })
        .map(|q| q.id)
}

/// Earliest time at which the schedule stands at `q.a` no earlier than `q.r`.
fn earliest_visit(schedule: &SolvedSchedule, q: &Request, tol: f64) -> Option<f64> {
    let x = q.a;
    let start = (schedule.start_time, schedule.start_pos);
    if schedule.trajectory.segments.is_empty() {
        return ((start.1 - x).abs() <= tol && start.0 >= q.r - tol).then_some(start.0);
    }
    for s in &schedule.trajectory.segments {
        let candidate = if (s.start_pos - x).abs() <= tol && (s.end_pos - x).abs() <= tol {
            // Standing at x over the whole segment.
            (s.end_time >= q.r - tol).then(|| s.start_time.max(q.r).min(s.end_time))
        } else {
            let (lo, hi) = (s.start_pos.min(s.end_pos), s.start_pos.max(s.end_pos));
            if x < lo - tol || x > hi + tol {
                None
            } else {
                let frac = ((x - s.start_pos) / (s.end_pos - s.start_pos)).clamp(0.0, 1.0);
                let t = s.start_time + frac * (s.end_time - s.start_time);
                (t >= q.r - tol).then_some(t)
            }
        };
        if candidate.is_some() {
            return candidate;
        }
    }
    None
}

fn merge(schedule: SolvedSchedule, absorbed: Vec<(f64, usize)>) -> SolvedSchedule {
    if absorbed.is_empty() {
        return schedule;
    }
    let mut events = schedule.trajectory.events.clone();
    for (time, request) in absorbed {
        events.push(Event { time, request, kind: ActionKind::Pickup });
        events.push(Event { time, request, kind: ActionKind::Delivery });
    }
    events.sort_by(|x, y| x.time.total_cmp(&y.time));
    let actions: Vec<Action> = events.iter().map(Event::action).collect();
    SolvedSchedule { actions, trajectory: Trajectory { events, ..schedule.trajectory }, ..schedule }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{verify_trajectory, Capacity, Instance, Variant};
    use crate::offline::brute_force_solve;

    fn instance(triples: &[(f64, f64, f64)], v: Variant) -> Instance {
        Instance::new(Capacity::Finite(1), v, triples.iter().copied())
    }

    #[test]
    fn matches_plain_search_on_small_sets() {
        let triples = [(0.5, 0.5, 0.2), (-1.0, -1.0, 3.0), (0.25, 0.25, 4.0), (2.0, 1.0, 0.0), (-0.5, -0.5, 0.0)];
        for v in [Variant::Open, Variant::Closed] {
            let inst = instance(&triples, v);
            let q = SolverQuery::for_instance(&inst);
            let refined = solve_by_refinement(&q, &SolverConfig::default()).unwrap();
            let oracle = brute_force_solve(&q).unwrap();
            assert!((refined.length - oracle).abs() < 1e-9, "{v}: {} vs {oracle}", refined.length);
            assert_eq!(verify_trajectory(&inst, &refined.trajectory, 1e-9), Ok(()));
        }
    }

    #[test]
    fn chain_of_points_is_absorbed() {
        // Points released just in time along the way to 1.
        let mut triples: Vec<_> = (1..=200)
            .map(|i| {
                let x = i as f64 / 200.0;
                (x, x, x)
            })
            .collect();
        triples.push((-0.5, -0.5, 0.0));
        let inst = instance(&triples, Variant::Open);
        let s = solve_by_refinement(&SolverQuery::for_instance(&inst), &SolverConfig::default()).unwrap();
        assert!((s.length - 2.0).abs() < 1e-12);
        assert_eq!(s.actions.len(), 2 * inst.len());
        assert_eq!(verify_trajectory(&inst, &s.trajectory, 1e-9), Ok(()));
    }

    #[test]
    fn late_points_join_the_core() {
        // The path to 1 passes 0.5 too early; the optimum must come back for it.
        let inst = instance(&[(1.0, 1.0, 0.0), (0.5, 0.5, 1.9), (0.0, 0.0, 0.0)], Variant::Open);
        let q = SolverQuery::for_instance(&inst);
        let s = solve_by_refinement(&q, &SolverConfig::default()).unwrap();
        assert!((s.length - brute_force_solve(&q).unwrap()).abs() < 1e-12);
    }
}
