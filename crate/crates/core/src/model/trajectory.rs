use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Capacity, Instance, Variant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ActionKind {
    Pickup,
    Delivery,
}

/// One step of a schedule. The derived order (kind first, then id) is the solver's tie-break order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Action {
    pub kind: ActionKind,
    pub request: usize,
}

impl Action {
    pub fn pickup(request: usize) -> Self {
        Self { kind: ActionKind::Pickup, request }
    }

    pub fn delivery(request: usize) -> Self {
        Self { kind: ActionKind::Delivery, request }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            ActionKind::Pickup => 'P',
            ActionKind::Delivery => 'D',
        };
        write!(f, "{tag}{}", self.request)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start_time: f64,
    pub start_pos: f64,
    pub end_time: f64,
    pub end_pos: f64,
}

impl Segment {
    pub fn position_at(&self, t: f64) -> f64 {
        let dt = self.end_time - self.start_time;
        if dt <= 0.0 || t >= self.end_time {
            return self.end_pos;
        }
        if t <= self.start_time {
            return self.start_pos;
        }
        self.start_pos + (self.end_pos - self.start_pos) * ((t - self.start_time) / dt)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub request: usize,
    pub kind: ActionKind,
}

impl Event {
    pub fn action(&self) -> Action {
        Action { kind: self.kind, request: self.request }
    }
}

/// Time-stamped piecewise linear server path with its pickup and delivery events.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub segments: Vec<Segment>,
    pub events: Vec<Event>,
    pub cost: f64,
}

impl Trajectory {
    pub fn start(&self) -> Option<(f64, f64)> {
        self.segments.first().map(|s| (s.start_time, s.start_pos))
    }

    pub fn end(&self) -> Option<(f64, f64)> {
        self.segments.last().map(|s| (s.end_time, s.end_pos))
    }

    pub fn position_at(&self, t: f64) -> Option<f64> {
        let first = self.segments.first()?;
        if t <= first.start_time {
            return Some(first.start_pos);
        }
        let idx = self.segments.partition_point(|s| s.end_time < t);
        let seg = self.segments.get(idx).or(self.segments.last())?;
        Some(seg.position_at(t))
    }

    /// Leftmost and rightmost positions occupied during `[from, to]`.
    pub fn visited_range(&self, from: f64, to: f64) -> Option<(f64, f64)> {
        let mut range: Option<(f64, f64)> = None;
        let mut include = |x: f64| {
            range = Some(match range {
                None => (x, x),
                Some((lo, hi)) => (lo.min(x), hi.max(x)),
            });
        };
        for s in &self.segments {
            if s.end_time < from || s.start_time > to {
                continue;
            }
            include(s.position_at(from.max(s.start_time)));
            include(s.position_at(to.min(s.end_time)));
        }
        range
    }

    pub fn actions(&self) -> Vec<Action> {
        self.events.iter().map(Event::action).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ViolationKind {
    StartNotAtOrigin,
    Discontinuity { segment: usize },
    UnitSpeed { segment: usize },
    EventsOutOfOrder,
    UnknownRequest { request: usize },
    DuplicateAction { request: usize, kind: ActionKind },
    MissingAction { request: usize, kind: ActionKind },
    WrongPosition { request: usize, kind: ActionKind, expected: f64, actual: f64 },
    EarlyPickup { request: usize, release: f64 },
    DeliveryBeforePickup { request: usize },
    EventAfterEnd { request: usize },
    CapacityExceeded { load: usize },
    NotReturnedToOrigin { position: f64 },
    CostMismatch { claimed: f64, actual: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryViolation {
    pub time: f64,
    pub kind: ViolationKind,
}

impl fmt::Display for TrajectoryViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at time {}: {:?}", self.time, self.kind)
    }
}

impl std::error::Error for TrajectoryViolation {}

fn fail(time: f64, kind: ViolationKind) -> Result<(), TrajectoryViolation> {
    Err(TrajectoryViolation { time, kind })
}

/// Checks that `trajectory` is a feasible schedule for `instance` and that its cost is consistent.
pub fn verify_trajectory(instance: &Instance, trajectory: &Trajectory, tol: f64) -> Result<(), TrajectoryViolation> {
    let segs = &trajectory.segments;
    if let Some(first) = segs.first() {
        if first.start_time.abs() > tol || first.start_pos.abs() > tol {
            return fail(first.start_time, ViolationKind::StartNotAtOrigin);
        }
    }
    for (i, s) in segs.iter().enumerate() {
        if i > 0 {
            let prev = &segs[i - 1];
            if (s.start_time - prev.end_time).abs() > tol || (s.start_pos - prev.end_pos).abs() > tol {
                return fail(s.start_time, ViolationKind::Discontinuity { segment: i });
            }
        }
        if (s.end_pos - s.start_pos).abs() > s.end_time - s.start_time + tol {
            return fail(s.start_time, ViolationKind::UnitSpeed { segment: i });
        }
    }
    let (end_time, end_pos) = trajectory.end().unwrap_or((0.0, 0.0));
    let position = |t: f64| trajectory.position_at(t).unwrap_or(0.0);

    let n = instance.requests.len();
    let mut pickup: Vec<Option<(usize, f64)>> = vec![None; n];
    let mut delivery: Vec<Option<(usize, f64)>> = vec![None; n];
    let mut last_time = f64::NEG_INFINITY;
    for (k, ev) in trajectory.events.iter().enumerate() {
        if ev.time < last_time - tol {
            return fail(ev.time, ViolationKind::EventsOutOfOrder);
        }
        last_time = last_time.max(ev.time);
        let Some(q) = instance.requests.get(ev.request) else {
            return fail(ev.time, ViolationKind::UnknownRequest { request: ev.request });
        };
        if ev.time > end_time + tol {
            return fail(ev.time, ViolationKind::EventAfterEnd { request: q.id });
        }
        let (slot, expected) = match ev.kind {
            ActionKind::Pickup => (&mut pickup[q.id], q.a),
            ActionKind::Delivery => (&mut delivery[q.id], q.b),
        };
        if slot.is_some() {
            return fail(ev.time, ViolationKind::DuplicateAction { request: q.id, kind: ev.kind });
        }
        *slot = Some((k, ev.time));
        let actual = position(ev.time);
        if (actual - expected).abs() > tol {
            return fail(ev.time, ViolationKind::WrongPosition { request: q.id, kind: ev.kind, expected, actual });
        }
        match ev.kind {
            ActionKind::Pickup if ev.time < q.r - tol => {
                return fail(ev.time, ViolationKind::EarlyPickup { request: q.id, release: q.r });
            }
            ActionKind::Delivery if pickup[q.id].is_none() => {
                return fail(ev.time, ViolationKind::DeliveryBeforePickup { request: q.id });
            }
            _ => {}
        }
    }
    let mut intervals = Vec::with_capacity(n);
    for q in &instance.requests {
        let (Some((_, p)), Some((_, d))) = (pickup[q.id], delivery[q.id]) else {
            let kind = if pickup[q.id].is_none() { ActionKind::Pickup } else { ActionKind::Delivery };
            return fail(end_time, ViolationKind::MissingAction { request: q.id, kind });
        };
        intervals.push((p, d));
    }
    if let Capacity::Finite(c) = instance.capacity {
        // A request occupies the server on [pickup, delivery).
        for &(tau, _) in &intervals {
            let load = intervals.iter().filter(|&&(p, d)| p <= tau && d > tau + tol).count();
            if load > c {
                return fail(tau, ViolationKind::CapacityExceeded { load });
            }
        }
    }
    let last_event = trajectory.events.iter().map(|e| e.time).fold(0.0, f64::max);
    let actual = match instance.variant {
        Variant::Open => last_event,
        Variant::Closed => {
            if end_pos.abs() > tol {
                return fail(end_time, ViolationKind::NotReturnedToOrigin { position: end_pos });
            }
            end_time.max(last_event)
        }
    };
    if (trajectory.cost - actual).abs() > tol {
        return fail(actual, ViolationKind::CostMismatch { claimed: trajectory.cost, actual });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Capacity, Instance, Variant, DEFAULT_TOLERANCE as TOL};

    fn seg(t0: f64, x0: f64, t1: f64, x1: f64) -> Segment {
        Segment { start_time: t0, start_pos: x0, end_time: t1, end_pos: x1 }
    }

    fn ev(time: f64, request: usize, kind: ActionKind) -> Event {
        Event { time, request, kind }
    }

    fn serve_point(t: f64, id: usize) -> [Event; 2] {
        [ev(t, id, ActionKind::Pickup), ev(t, id, ActionKind::Delivery)]
    }

    #[test]
    fn straight_line_service_is_ok() {
        let inst = Instance::new(Capacity::Finite(1), Variant::Open, [(1.0, 1.0, 0.0)]);
        let t = Trajectory { segments: vec![seg(0.0, 0.0, 1.0, 1.0)], events: serve_point(1.0, 0).to_vec(), cost: 1.0 };
        assert_eq!(verify_trajectory(&inst, &t, TOL), Ok(()));
    }

    #[test]
    fn too_fast_is_a_speed_violation() {
        let inst = Instance::new(Capacity::Finite(1), Variant::Open, [(1.0, 1.0, 0.0)]);
        let t = Trajectory { segments: vec![seg(0.0, 0.0, 0.5, 1.0)], events: serve_point(0.5, 0).to_vec(), cost: 0.5 };
        let v = verify_trajectory(&inst, &t, TOL).unwrap_err();
        assert_eq!(v.kind, ViolationKind::UnitSpeed { segment: 0 });
    }

    #[test]
    fn closed_round_trip() {
        let inst = Instance::new(Capacity::Finite(1), Variant::Closed, [(0.5, 0.5, 0.0)]);
        let t = Trajectory {
            segments: vec![seg(0.0, 0.0, 0.5, 0.5), seg(0.5, 0.5, 1.0, 0.0)],
            events: serve_point(0.5, 0).to_vec(),
            cost: 1.0,
        };
        assert_eq!(verify_trajectory(&inst, &t, TOL), Ok(()));
        let stay = Trajectory { segments: vec![seg(0.0, 0.0, 0.5, 0.5)], events: serve_point(0.5, 0).to_vec(), cost: 0.5 };
        let v = verify_trajectory(&inst, &stay, TOL).unwrap_err();
        assert!(matches!(v.kind, ViolationKind::NotReturnedToOrigin { .. }));
    }

    #[test]
    fn early_pickup_and_wrong_cost() {
        let inst = Instance::new(Capacity::Finite(1), Variant::Open, [(1.0, 1.0, 2.0)]);
        let early = Trajectory { segments: vec![seg(0.0, 0.0, 1.0, 1.0)], events: serve_point(1.0, 0).to_vec(), cost: 1.0 };
        assert!(matches!(verify_trajectory(&inst, &early, TOL).unwrap_err().kind, ViolationKind::EarlyPickup { .. }));
        let waited = Trajectory {
            segments: vec![seg(0.0, 0.0, 1.0, 1.0), seg(1.0, 1.0, 2.0, 1.0)],
            events: serve_point(2.0, 0).to_vec(),
            cost: 1.5,
        };
        assert!(matches!(verify_trajectory(&inst, &waited, TOL).unwrap_err().kind, ViolationKind::CostMismatch { .. }));
    }

    #[test]
    fn capacity_is_half_open() {
        // Deliver the first object exactly where and when the second is picked up.
        let triples = [(0.0, 1.0, 0.0), (1.0, 2.0, 0.0)];
        let inst = Instance::new(Capacity::Finite(1), Variant::Open, triples);
        let events = vec![
            ev(0.0, 0, ActionKind::Pickup),
            ev(1.0, 1, ActionKind::Pickup),
            ev(1.0, 0, ActionKind::Delivery),
            ev(2.0, 1, ActionKind::Delivery),
        ];
        let t = Trajectory { segments: vec![seg(0.0, 0.0, 2.0, 2.0)], events, cost: 2.0 };
        assert_eq!(verify_trajectory(&inst, &t, TOL), Ok(()));

        let overlap = Instance::new(Capacity::Finite(1), Variant::Open, [(0.0, 2.0, 0.0), (1.0, 2.0, 0.0)]);
        let events = vec![
            ev(0.0, 0, ActionKind::Pickup),
            ev(1.0, 1, ActionKind::Pickup),
            ev(2.0, 0, ActionKind::Delivery),
            ev(2.0, 1, ActionKind::Delivery),
        ];
        let t = Trajectory { segments: vec![seg(0.0, 0.0, 2.0, 2.0)], events, cost: 2.0 };
        let v = verify_trajectory(&overlap, &t, TOL).unwrap_err();
        assert_eq!(v.kind, ViolationKind::CapacityExceeded { load: 2 });
        assert_eq!(verify_trajectory(&overlap.with_capacity(Capacity::Finite(2)), &t, TOL), Ok(()));
    }

    #[test]
    fn missing_and_misplaced_events() {
        let inst = Instance::new(Capacity::Finite(1), Variant::Open, [(1.0, 1.0, 0.0)]);
        let none = Trajectory { segments: vec![seg(0.0, 0.0, 1.0, 1.0)], events: vec![], cost: 0.0 };
        assert!(matches!(verify_trajectory(&inst, &none, TOL).unwrap_err().kind, ViolationKind::MissingAction { .. }));
        let wrong = Trajectory { segments: vec![seg(0.0, 0.0, 1.0, 1.0)], events: serve_point(0.5, 0).to_vec(), cost: 0.5 };
        assert!(matches!(verify_trajectory(&inst, &wrong, TOL).unwrap_err().kind, ViolationKind::WrongPosition { .. }));
        let moved = Trajectory { segments: vec![seg(0.0, 0.5, 1.0, 1.0)], events: serve_point(1.0, 0).to_vec(), cost: 1.0 };
        assert_eq!(verify_trajectory(&inst, &moved, TOL).unwrap_err().kind, ViolationKind::StartNotAtOrigin);
    }

    #[test]
    fn visited_range_clips_to_window() {
        let t = Trajectory { segments: vec![seg(0.0, 0.0, 2.0, 2.0), seg(2.0, 2.0, 5.0, -1.0)], events: vec![], cost: 5.0 };
        assert_eq!(t.visited_range(1.0, 3.0), Some((1.0, 2.0)));
        assert_eq!(t.visited_range(0.0, 5.0), Some((-1.0, 2.0)));
        assert_eq!(t.position_at(4.0), Some(0.0));
    }
}
