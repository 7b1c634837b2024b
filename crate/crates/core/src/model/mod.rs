//! Requests, instances, extents and trajectories on the real line.

mod json;
mod trajectory;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use json::{instance_from_json, instance_to_json, FormatError};
pub use trajectory::{verify_trajectory, Action, ActionKind, Event, Segment, Trajectory, TrajectoryViolation, ViolationKind};

/// Absolute tolerance used for every floating point comparison unless overridden.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// A transportation request `(a, b; r)`: carry an object from `a` to `b`, not before time `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub id: usize,
    pub a: f64,
    pub b: f64,
    pub r: f64,
}

impl Request {
    pub fn new(id: usize, a: f64, b: f64, r: f64) -> Self {
        Self { id, a, b, r }
    }

    /// Point requests only require the server to visit `a` after `r`.
    pub fn is_point(&self) -> bool {
        self.a == self.b
    }

    pub fn span(&self) -> f64 {
        (self.b - self.a).abs()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Capacity {
    Finite(usize),
    Unbounded,
}

impl Capacity {
    /// Whether carrying `load` objects at once is allowed.
    pub fn admits(self, load: usize) -> bool {
        match self {
            Capacity::Finite(c) => load <= c,
            Capacity::Unbounded => true,
        }
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(c) => write!(f, "{c}"),
            Capacity::Unbounded => f.write_str("inf"),
        }
    }
}

impl FromStr for Capacity {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "unbounded" | "∞") {
            return Ok(Capacity::Unbounded);
        }
        match s.parse::<usize>() {
            Ok(c) if c >= 1 => Ok(Capacity::Finite(c)),
            _ => Err(ModelError::BadCapacity(s.to_string())),
        }
    }
}

impl Serialize for Capacity {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Capacity::Finite(c) => serializer.serialize_u64(*c as u64),
            Capacity::Unbounded => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Capacity {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(c) => Ok(Capacity::Finite(c as usize)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Whether the server has to return to the origin after the last delivery.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Open,
    Closed,
}

impl Variant {
    pub fn is_closed(self) -> bool {
        self == Variant::Closed
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Open => "open",
            Variant::Closed => "closed",
        })
    }
}

impl FromStr for Variant {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "open" => Ok(Variant::Open),
            "closed" => Ok(Variant::Closed),
            other => Err(ModelError::BadVariant(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub requests: Vec<Request>,
    pub capacity: Capacity,
    pub variant: Variant,
}

impl Instance {
    /// Builds an instance from `(a, b, r)` triples, assigning ids in input order.
    pub fn new<I>(capacity: Capacity, variant: Variant, triples: I) -> Self
    where
        I: IntoIterator<Item = (f64, f64, f64)>,
    {
        let requests = triples.into_iter().enumerate().map(|(id, (a, b, r))| Request::new(id, a, b, r)).collect();
        Self { requests, capacity, variant }
    }

    pub fn empty(capacity: Capacity, variant: Variant) -> Self {
        Self { requests: Vec::new(), capacity, variant }
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    pub fn with_capacity(mut self, capacity: Capacity) -> Self {
        self.capacity = capacity;
        self
    }

    /// Reflects every position through the origin.
    pub fn mirrored(&self) -> Self {
        let requests = self.requests.iter().map(|q| Request::new(q.id, -q.a, -q.b, q.r)).collect();
        Self { requests, capacity: self.capacity, variant: self.variant }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("undefined extents: empty request set without origin")]
    UndefinedExtents,
    #[error("capacity must be a positive integer or \"inf\", got {0:?}")]
    BadCapacity(String),
    #[error("variant must be \"open\" or \"closed\", got {0:?}")]
    BadVariant(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Violation {
    NegativeRelease { id: usize, r: f64 },
    NonFinite { id: usize, field: &'static str },
    IdOutOfOrder { index: usize, id: usize },
    ZeroCapacity,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeRelease { id, r } => write!(f, "request {id}: negative release time {r}"),
            Violation::NonFinite { id, field } => write!(f, "request {id}: field {field} is not finite"),
            Violation::IdOutOfOrder { index, id } => write!(f, "request at index {index} has id {id}"),
            Violation::ZeroCapacity => f.write_str("capacity must be at least 1"),
        }
    }
}

/// Checks the instance invariants. Returns every violation found; empty means valid.
pub fn validate(instance: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    if instance.capacity == Capacity::Finite(0) {
        out.push(Violation::ZeroCapacity);
    }
    for (index, q) in instance.requests.iter().enumerate() {
        if q.id != index {
            out.push(Violation::IdOutOfOrder { index, id: q.id });
        }
        for (field, v) in [("a", q.a), ("b", q.b), ("r", q.r)] {
            if !v.is_finite() {
                out.push(Violation::NonFinite { id: q.id, field });
            }
        }
        if q.r < 0.0 {
            out.push(Violation::NegativeRelease { id: q.id, r: q.r });
        }
    }
    out
}

/// Requests released at time zero. Accepted, but reported separately from violations.
pub fn zero_release_notes(instance: &Instance) -> Vec<usize> {
    instance.requests.iter().filter(|q| q.r == 0.0).map(|q| q.id).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extents {
    pub x_minus: f64,
    pub x_plus: f64,
}

impl Extents {
    pub fn width(&self) -> f64 {
        self.x_plus - self.x_minus
    }
}

/// Leftmost and rightmost position among all `a_i`, `b_i`, optionally including the origin.
pub fn request_extents<'a, I>(requests: I, include_origin: bool) -> Result<Extents, ModelError>
where
    I: IntoIterator<Item = &'a Request>,
{
    let init = if include_origin { Some((0.0, 0.0)) } else { None };
    let bounds = requests.into_iter().fold(init, |acc, q| {
        let (lo, hi) = (q.a.min(q.b), q.a.max(q.b));
        Some(match acc {
            None => (lo, hi),
            Some((l, h)) => (l.min(lo), h.max(hi)),
        })
    });
    bounds.map(|(x_minus, x_plus)| Extents { x_minus, x_plus }).ok_or(ModelError::UndefinedExtents)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_instance_is_valid() {
        assert!(validate(&Instance::empty(Capacity::Finite(1), Variant::Open)).is_empty());
    }

    #[test]
    fn negative_release_is_reported() {
        let inst = Instance::new(Capacity::Finite(1), Variant::Open, [(1.0, 1.0, -0.5)]);
        assert_eq!(validate(&inst), vec![Violation::NegativeRelease { id: 0, r: -0.5 }]);
    }

    #[test]
    fn zero_release_is_a_note_not_a_violation() {
        let inst = Instance::new(Capacity::Finite(1), Variant::Open, [(1.0, 1.0, 0.0), (2.0, 2.0, 1.0)]);
        assert!(validate(&inst).is_empty());
        assert_eq!(zero_release_notes(&inst), vec![0]);
    }

    #[test]
    fn structural_violations() {
        let mut inst = Instance::new(Capacity::Finite(0), Variant::Open, [(f64::NAN, 1.0, 0.0)]);
        inst.requests.push(Request::new(5, 0.0, 0.0, 0.0));
        let v = validate(&inst);
        assert!(v.contains(&Violation::ZeroCapacity));
        assert!(v.contains(&Violation::NonFinite { id: 0, field: "a" }));
        assert!(v.contains(&Violation::IdOutOfOrder { index: 1, id: 5 }));
    }

    #[test]
    fn extents_examples() {
        let one = [Request::new(0, 1.0, 1.0, 0.0)];
        assert_eq!(request_extents(&one, true).unwrap(), Extents { x_minus: 0.0, x_plus: 1.0 });
        assert_eq!(request_extents(&one, false).unwrap(), Extents { x_minus: 1.0, x_plus: 1.0 });
        let two = [Request::new(0, -0.5, 0.0, 1.0), Request::new(1, 1.0 / 3.0, 1.0, 1.0)];
        assert_eq!(request_extents(&two, true).unwrap(), Extents { x_minus: -0.5, x_plus: 1.0 });
        assert_eq!(request_extents(&[], false), Err(ModelError::UndefinedExtents));
        assert_eq!(request_extents(&[], true).unwrap(), Extents { x_minus: 0.0, x_plus: 0.0 });
    }

    #[test]
    fn capacity_and_variant_parse() {
        assert_eq!("inf".parse::<Capacity>().unwrap(), Capacity::Unbounded);
        assert_eq!("3".parse::<Capacity>().unwrap(), Capacity::Finite(3));
        assert!("0".parse::<Capacity>().is_err());
        assert_eq!("closed".parse::<Variant>().unwrap(), Variant::Closed);
        assert!(Capacity::Finite(2).admits(2) && !Capacity::Finite(2).admits(3));
    }
}
