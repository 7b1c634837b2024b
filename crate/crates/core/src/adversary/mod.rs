//! Instance families on which Smartstart and Ignore attain their worst-case ratios,
//! each paired with its closed-form costs.

mod lure;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algorithms::AlgorithmSpec;
use crate::bounds::{nowait_limit, BoundCurve};
use crate::model::{Capacity, Instance, Variant};

pub use lure::{lure, Lure};

/// Default ceiling on the number of lure steps.
pub const DEFAULT_MAX_LURE: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    /// Tight for `f1`: the last schedule starts after a wait.
    Waiting,
    /// Tight for `f2`: the last schedule starts without waiting.
    NoWait,
    G1,
    G2,
    G3,
    G4,
    Closed,
    Ignore,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 8] =
        [Self::Waiting, Self::NoWait, Self::G1, Self::G2, Self::G3, Self::G4, Self::Closed, Self::Ignore];

    /// Θ range on which the construction is valid.
    pub fn theta_domain(self) -> Option<crate::bounds::Interval> {
        use crate::bounds::Interval;
        match self {
            Self::Waiting => Some(Interval::new(2.0, 3.0, false, false)),
            Self::NoWait => Some(Interval::new(2.0, nowait_limit(), true, true)),
            Self::G1 => Some(BoundCurve::G1.domain()),
            Self::G2 => Some(BoundCurve::G2.domain()),
            Self::G3 => Some(BoundCurve::G3.domain()),
            Self::G4 => Some(BoundCurve::G4.domain()),
            Self::Closed => Some(Interval::new(1.0, f64::INFINITY, false, false)),
            Self::Ignore => None,
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Waiting => "waiting",
            Self::NoWait => "nowait",
            Self::G1 => "g1",
            Self::G2 => "g2",
            Self::G3 => "g3",
            Self::G4 => "g4",
            Self::Closed => "closed",
            Self::Ignore => "ignore",
        })
    }
}

impl FromStr for FamilyKind {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "waiting" | "open-waiting" | "f1" => Self::Waiting,
            "nowait" | "no-wait" | "open-nowait" | "f2" => Self::NoWait,
            "g1" => Self::G1,
            "g2" => Self::G2,
            "g3" => Self::G3,
            "g4" => Self::G4,
            "closed" => Self::Closed,
            "ignore" => Self::Ignore,
            other => return Err(FamilyError::UnknownFamily(other.to_string())),
        })
    }
}

/// Whether Smartstart waits before its final schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinalStart {
    Waits,
    Immediate,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum FamilyError {
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("{family}: {param} = {value} is out of range (requires {requirement})")]
    OutOfDomain { family: &'static str, param: &'static str, value: f64, requirement: String },
    #[error("lure needs {needed} steps, limit is {limit}")]
    LureTooLong { needed: usize, limit: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyOptions {
    pub capacity: Capacity,
    pub max_lure: usize,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        Self { capacity: Capacity::Finite(1), max_lure: DEFAULT_MAX_LURE }
    }
}

/// Expected values published next to a generated instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub family: FamilyKind,
    pub theta: Option<f64>,
    pub eps: f64,
    pub algorithm: AlgorithmSpec,
    pub expected_alg: f64,
    pub expected_opt: f64,
    pub expected_ratio: f64,
    pub final_start: FinalStart,
    pub lure_steps: usize,
    pub notes: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedFamily {
    pub instance: Instance,
    pub expectation: Expectation,
}

impl GeneratedFamily {
    pub fn expected_alg(&self) -> f64 {
        self.expectation.expected_alg
    }

    pub fn expected_opt(&self) -> f64 {
        self.expectation.expected_opt
    }

    pub fn expected_ratio(&self) -> f64 {
        self.expectation.expected_ratio
    }

    pub fn target(&self) -> AlgorithmSpec {
        self.expectation.algorithm
    }
}

pub fn generate(kind: FamilyKind, theta: f64, eps: f64, opts: &FamilyOptions) -> Result<GeneratedFamily, FamilyError> {
    match kind {
        FamilyKind::Waiting => family_open_waiting(theta, eps, opts),
        FamilyKind::NoWait => family_open_nowait(theta, eps, opts),
        FamilyKind::G1 => family_g1(theta, eps, opts),
        FamilyKind::G2 => family_g2(theta, eps, opts),
        FamilyKind::G3 => family_g3(theta, eps, opts),
        FamilyKind::G4 => family_g4(theta, eps, opts),
        FamilyKind::Closed => family_closed(theta, eps, opts),
        FamilyKind::Ignore => family_ignore(eps, opts),
    }
}

fn require(
    family: &'static str,
    param: &'static str,
    value: f64,
    ok: bool,
    requirement: impl Into<String>,
) -> Result<(), FamilyError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(FamilyError::OutOfDomain { family, param, value, requirement: requirement.into() })
    }
}

fn theta_in(kind: FamilyKind, family: &'static str, theta: f64) -> Result<(), FamilyError> {
    let domain = kind.theta_domain().expect("family has a Θ range");
    require(family, "theta", theta, domain.contains(theta), format!("Θ in {domain}"))
}

fn eps_below(family: &'static str, eps: f64, cap: f64) -> Result<(), FamilyError> {
    require(family, "eps", eps, eps > 0.0 && eps < cap, format!("0 < ε < {cap}"))
}

struct Parts {
    kind: FamilyKind,
    theta: f64,
    eps: f64,
    alg: f64,
    opt: f64,
    ratio: f64,
    final_start: FinalStart,
    notes: &'static str,
}

/// Lure to 1 with the given μ, followed by the family's own requests.
fn lured(parts: Parts, mu: f64, tail: &[(f64, f64, f64)], opts: &FamilyOptions) -> Result<GeneratedFamily, FamilyError> {
    let l = lure(1.0, mu, parts.theta, opts.max_lure)?;
    let triples = l.requests.iter().chain(tail).copied();
    let instance = Instance::new(opts.capacity, Variant::Open, triples);
    Ok(finish(parts, instance, l.n + 1))
}

fn finish(parts: Parts, instance: Instance, lure_steps: usize) -> GeneratedFamily {
    let algorithm = match parts.kind {
        FamilyKind::Ignore => AlgorithmSpec::Ignore,
        _ => AlgorithmSpec::Smartstart { theta: parts.theta },
    };
    let theta = (parts.kind != FamilyKind::Ignore).then_some(parts.theta);
    GeneratedFamily {
        instance,
        expectation: Expectation {
            family: parts.kind,
            theta,
            eps: parts.eps,
            algorithm,
            expected_alg: parts.alg,
            expected_opt: parts.opt,
            expected_ratio: parts.ratio,
            final_start: parts.final_start,
            lure_steps,
            notes: parts.notes.to_string(),
        },
    }
}

/// Θ ∈ (2, 3): Smartstart waits before its last schedule and reaches `f1(Θ) − ε`.
pub fn family_open_waiting(theta: f64, eps: f64, opts: &FamilyOptions) -> Result<GeneratedFamily, FamilyError> {
    const NAME: &str = "waiting";
    theta_in(FamilyKind::Waiting, NAME, theta)?;
    let t = theta;
    let d = t * t + t - 2.0;
    eps_below(NAME, eps, (2.0 / 9.0) * (2.0 * t * t / d))?;
    let e = d / (2.0 * t * t) * eps;
    let r = 1.0 / t + e;
    let parts = Parts {
        kind: FamilyKind::Waiting,
        theta,
        eps,
        alg: (2.0 * t + 2.0 - 2.0 * e * t) / (t - 1.0),
        opt: (t + 2.0) / t,
        ratio: BoundCurve::F1.eval_unchecked(t) - eps,
        final_start: FinalStart::Waits,
        notes: "lure to 1, then one schedule that waits until L/(Θ−1)",
    };
    lured(parts, e / 2.0, &[(-1.0 / t + e, 0.0, r), (1.0 / t, 1.0, r)], opts)
}

/// Θ ∈ [2, (1+√13)/2]: the last schedule starts right after the previous one and reaches `f2(Θ) − ε`.
pub fn family_open_nowait(theta: f64, eps: f64, opts: &FamilyOptions) -> Result<GeneratedFamily, FamilyError> {
    const NAME: &str = "nowait";
    theta_in(FamilyKind::NoWait, NAME, theta)?;
    let t = theta;
    eps_below(NAME, eps, (3.0 * t * t - t) / (3.0 * t + 3.0) / (5.0 * t))?;
    let e = (3.0 * t + 3.0) / (3.0 * t * t - t) * eps;
    let r = 1.0 / t + e;
    let big_r = (3.0 * t + 3.0) / (t * (t - 1.0));
    let x = big_r - 2.0 / t - e;
    let far = 2.0 + 1.0 / t - e;
    let parts = Parts {
        kind: FamilyKind::NoWait,
        theta,
        eps,
        alg: (3.0 * t + 3.0) / (t - 1.0) + big_r - 1.0 / t - (3.0 * t - 1.0) / (t - 1.0) * e,
        opt: big_r,
        ratio: BoundCurve::F2.eval_unchecked(t) - eps,
        final_start: FinalStart::Immediate,
        notes: "lure to 1, a waiting schedule, then the last schedule starts without waiting",
    };
    lured(parts, e / 2.0, &[(far, far, r), (-1.0 / t, -1.0 / t, r), (x, x, big_r)], opts)
}

/// Θ ∈ (1, 2], ε < 1/100.
pub fn family_g1(theta: f64, eps: f64, opts: &FamilyOptions) -> Result<GeneratedFamily, FamilyError> {
    const NAME: &str = "g1";
    theta_in(FamilyKind::G1, NAME, theta)?;
    eps_below(NAME, eps, 0.01)?;
    let t = theta;
    let r = 1.0 / t + 2.0 * eps;
    let alg = 3.0 * t / (t - 1.0);
    let opt = 1.0 + 2.0 / t + 2.5 * eps;
    let parts = Parts {
        kind: FamilyKind::G1,
        theta,
        eps,
        alg,
        opt,
        ratio: alg / opt,
        final_start: FinalStart::Waits,
        notes: "lure to 1, then a single waiting schedule",
    };
    lured(parts, eps, &[(1.0 / t, 1.0 + eps / 2.0, r), (-1.0 / t, -eps, r)], opts)
}

/// Θ ∈ ((1+√13)/2, 1+√2], ε < 1/25.
pub fn family_g2(theta: f64, eps: f64, opts: &FamilyOptions) -> Result<GeneratedFamily, FamilyError> {
    const NAME: &str = "g2";
    theta_in(FamilyKind::G2, NAME, theta)?;
    eps_below(NAME, eps, 0.04)?;
    let t = theta;
    let r = 1.0 / t + 2.0 * eps;
    let far = 2.0 + 1.0 / t;
    let left = -1.0 / t - eps;
    let alg = (3.0 * t + 3.0) / (t - 1.0) + 2.0 + 2.0 / t;
    let opt = (2.0 * t + 3.0) / t + 2.5 * eps;
    let parts = Parts {
        kind: FamilyKind::G2,
        theta,
        eps,
        alg,
        opt,
        ratio: alg / opt,
        final_start: FinalStart::Immediate,
        notes: "lure to 1, a waiting schedule, then the last schedule starts without waiting",
    };
    let last = (3.0 * t + 3.0) / (t * (t - 1.0)) + eps;
    let tail = [(far - eps / 2.0, far - eps / 2.0, r), (left, left, r), (far - eps, far - eps, last)];
    lured(parts, eps, &tail, opts)
}

/// Θ ∈ (1+√2, 3), ε < 1/20.
pub fn family_g3(theta: f64, eps: f64, opts: &FamilyOptions) -> Result<GeneratedFamily, FamilyError> {
    const NAME: &str = "g3";
    theta_in(FamilyKind::G3, NAME, theta)?;
    eps_below(NAME, eps, 0.05)?;
    let t = theta;
    let r = 1.0 / t + 2.0 * eps;
    let alg = (3.0 * t - 1.0) / (t - 1.0) + 1.0 + 1.0 / t;
    let opt = 1.0 + 2.0 / t + 2.0 * eps;
    let parts = Parts {
        kind: FamilyKind::G3,
        theta,
        eps,
        alg,
        opt,
        ratio: alg / opt,
        final_start: FinalStart::Immediate,
        notes: "lure to 1, a waiting schedule, then the last schedule starts without waiting",
    };
    let last = (3.0 * t - 1.0) / (t * (t - 1.0)) + eps;
    lured(parts, eps, &[(1.0 / t, 1.0, r), (-1.0 / t, -1.0 / t, r), (1.0, 1.0, last)], opts)
}

/// Θ ≥ 3, ε < 1/75.
pub fn family_g4(theta: f64, eps: f64, opts: &FamilyOptions) -> Result<GeneratedFamily, FamilyError> {
    const NAME: &str = "g4";
    theta_in(FamilyKind::G4, NAME, theta)?;
    eps_below(NAME, eps, 1.0 / 75.0)?;
    let t = theta;
    let r = 1.0 / t + 2.0 * eps;
    let alg = 4.0 - 3.0 / t;
    let opt = 1.0 + 2.0 * eps;
    let parts = Parts {
        kind: FamilyKind::G4,
        theta,
        eps,
        alg,
        opt,
        ratio: alg / opt,
        final_start: FinalStart::Immediate,
        notes: "lure to 1, two schedules, neither waits",
    };
    let tail = [((t + 1.0) / (2.0 * t) + eps / 2.0, 1.0, r), (1.0 / t, 1.0 / t, r), (1.0, 1.0, 1.0 + 2.0 * eps)];
    lured(parts, eps, &tail, opts)
}

/// Closed variant. Θ ≤ 2 needs one request; larger Θ get a second one released mid-schedule.
/// ε is ignored for Θ ≤ 2.
pub fn family_closed(theta: f64, eps: f64, opts: &FamilyOptions) -> Result<GeneratedFamily, FamilyError> {
    const NAME: &str = "closed";
    theta_in(FamilyKind::Closed, NAME, theta)?;
    let t = theta;
    let base = t / (t - 1.0);
    let first = (0.5, 0.5, 0.0);
    let (triples, ratio, final_start, notes) = if t <= 2.0 {
        (vec![first], base, FinalStart::Waits, "one request; the only schedule waits")
    } else if t <= 3.0 {
        eps_below(NAME, eps, (1.0 - 1.0 / (t - 1.0)).min((t - 2.0) / (2.0 * (t - 1.0))))?;
        let x = 1.0 - 1.0 / (t - 1.0) - eps;
        let ratio = base + 2.0 - 2.0 / (t - 1.0) - 2.0 * eps;
        (
            vec![first, (x, x, 1.0 / (t - 1.0) + eps)],
            ratio,
            FinalStart::Immediate,
            "second request appears during the first schedule",
        )
    } else {
        eps_below(NAME, eps, 0.5 - 1.0 / (t - 1.0))?;
        (
            vec![first, (0.5, 0.5, 1.0 / (t - 1.0) + eps)],
            base + 1.0,
            FinalStart::Immediate,
            "second request appears during the first schedule",
        )
    };
    let parts = Parts { kind: FamilyKind::Closed, theta, eps, alg: ratio, opt: 1.0, ratio, final_start, notes };
    Ok(finish(parts, Instance::new(opts.capacity, Variant::Closed, triples), 0))
}

/// Ignore reaches `4 − ε` against an optimum of 1. Requires `0 < ε ≤ 5/2`.
pub fn family_ignore(eps: f64, opts: &FamilyOptions) -> Result<GeneratedFamily, FamilyError> {
    require("ignore", "eps", eps, eps > 0.0 && eps <= 2.5, "0 < ε ≤ 2.5")?;
    let near = 1.0 - eps / 5.0;
    let triples = [(near, near, 0.0), (0.5, near, eps / 5.0), (0.0, 0.0, eps / 5.0), (near, near, 1.0)];
    let parts = Parts {
        kind: FamilyKind::Ignore,
        theta: f64::NAN,
        eps,
        alg: 4.0 - eps,
        opt: 1.0,
        ratio: 4.0 - eps,
        final_start: FinalStart::Immediate,
        notes: "three schedules; the second carries the right request first and ends at the origin",
    };
    Ok(finish(parts, Instance::new(opts.capacity, Variant::Open, triples), 0))
}
