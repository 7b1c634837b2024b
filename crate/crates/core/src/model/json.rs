use std::fmt::Write as _;

use serde::Deserialize;
use thiserror::Error;

use super::{validate, Capacity, Instance, Request, Variant, Violation};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed instance JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid instance: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

#[derive(Deserialize)]
struct RawInstance {
    capacity: Capacity,
    variant: Variant,
    requests: Vec<RawRequest>,
}

#[derive(Deserialize)]
struct RawRequest {
    a: f64,
    b: f64,
    r: f64,
}

/// Parses and validates an instance file. Ids follow the order of the `requests` array.
pub fn instance_from_json(text: &str) -> Result<Instance, FormatError> {
    let raw: RawInstance = serde_json::from_str(text)?;
    let instance = Instance::new(raw.capacity, raw.variant, raw.requests.into_iter().map(|q| (q.a, q.b, q.r)));
    let violations = validate(&instance);
    if violations.is_empty() {
        Ok(instance)
    } else {
        Err(FormatError::Invalid(violations))
    }
}

fn number(x: f64) -> String {
    // 17 significant digits round-trip every f64.
    format!("{x:.16e}")
}

fn request_line(q: &Request) -> String {
    format!("{{\"a\": {}, \"b\": {}, \"r\": {}}}", number(q.a), number(q.b), number(q.r))
}

/// Canonical serialization: fixed key order, one request per line, 17 significant digits.
pub fn instance_to_json(instance: &Instance) -> String {
    let capacity = match instance.capacity {
        Capacity::Finite(c) => c.to_string(),
        Capacity::Unbounded => "\"inf\"".to_string(),
    };
    let mut out = String::new();
    let _ = write!(out, "{{\n  \"capacity\": {capacity},\n  \"variant\": \"{}\",\n  \"requests\": [", instance.variant);
    for (i, q) in instance.requests.iter().enumerate() {
        out.push_str(if i == 0 { "\n    " } else { ",\n    " });
        out.push_str(&request_line(q));
    }
    if !instance.requests.is_empty() {
        out.push_str("\n  ");
    }
    out.push_str("]\n}\n");
    out
}
