//! Competitive-ratio curves for Smartstart(Θ) and the optimal parameter Θ*.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Error)]
#[error("{curve} is undefined at Θ = {theta}; domain is {domain}")]
pub struct DomainError {
    pub curve: BoundCurve,
    pub theta: f64,
    pub domain: Interval,
}

/// A real interval with open or closed ends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        Self { lo, hi, lo_closed, hi_closed }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// `(1 + √13) / 2`, where the no-wait construction stops working.
pub fn nowait_limit() -> f64 {
    (1.0 + 13f64.sqrt()) / 2.0
}

pub fn one_plus_sqrt2() -> f64 {
    1.0 + std::f64::consts::SQRT_2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundCurve {
    F1,
    F2,
    G1,
    G2,
    G3,
    G4,
}

impl BoundCurve {
    pub const ALL: [BoundCurve; 6] = [Self::F1, Self::F2, Self::G1, Self::G2, Self::G3, Self::G4];
    pub const LOWER: [BoundCurve; 4] = [Self::G1, Self::G2, Self::G3, Self::G4];

    pub fn domain(self) -> Interval {
        match self {
            Self::F1 | Self::F2 => Interval::new(1.0, f64::INFINITY, false, false),
            Self::G1 => Interval::new(1.0, 2.0, false, true),
            Self::G2 => Interval::new(nowait_limit(), one_plus_sqrt2(), false, true),
            Self::G3 => Interval::new(one_plus_sqrt2(), 3.0, false, false),
            Self::G4 => Interval::new(3.0, f64::INFINITY, true, false),
        }
    }

    /// The formula itself, with no domain check.
    pub fn eval_unchecked(self, t: f64) -> f64 {
        match self {
            Self::F1 => (2.0 * t * t + 2.0 * t) / (t * t + t - 2.0),
            Self::F2 => t + 1.0 - (t - 1.0) / (3.0 * t + 3.0),
            Self::G1 => 3.0 * t * t / ((41.0 / 40.0) * t * t + (39.0 / 40.0) * t - 2.0),
            Self::G2 => ((3.0 * t + 3.0) / (t - 1.0) + 2.0 + 2.0 / t) / ((2.0 * t + 3.0) / t + 0.1),
            Self::G3 => ((3.0 * t - 1.0) / (t - 1.0) + 1.0 + 1.0 / t) / (1.1 + 2.0 / t),
            Self::G4 => (4.0 - 3.0 / t) / (1.0 + 1.0 / 75.0),
        }
    }

    pub fn eval(self, theta: f64) -> Result<f64, DomainError> {
        let domain = self.domain();
        if domain.contains(theta) {
            Ok(self.eval_unchecked(theta))
        } else {
            Err(DomainError { curve: self, theta, domain })
        }
    }

    /// The lower-bound curve whose interval contains Θ, if any.
    pub fn lower_for(theta: f64) -> Option<BoundCurve> {
        Self::LOWER.into_iter().find(|c| c.domain().contains(theta))
    }
}

impl fmt::Display for BoundCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::F1 => "f1",
            Self::F2 => "f2",
            Self::G1 => "g1",
            Self::G2 => "g2",
            Self::G3 => "g3",
            Self::G4 => "g4",
        })
    }
}

impl FromStr for BoundCurve {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|c| c.to_string() == s).ok_or_else(|| format!("unknown curve {s:?}"))
    }
}

/// Upper bound when Smartstart waits before its last schedule.
pub fn f1(theta: f64) -> Result<f64, DomainError> {
    BoundCurve::F1.eval(theta)
}

/// Upper bound when Smartstart starts its last schedule without waiting.
pub fn f2(theta: f64) -> Result<f64, DomainError> {
    BoundCurve::F2.eval(theta)
}

pub fn g1(theta: f64) -> Result<f64, DomainError> {
    BoundCurve::G1.eval(theta)
}

pub fn g2(theta: f64) -> Result<f64, DomainError> {
    BoundCurve::G2.eval(theta)
}

pub fn g3(theta: f64) -> Result<f64, DomainError> {
    BoundCurve::G3.eval(theta)
}

pub fn g4(theta: f64) -> Result<f64, DomainError> {
    BoundCurve::G4.eval(theta)
}

/// Competitive ratio of Smartstart(Θ) for the open variant: `max(f1, f2)`.
pub fn upper_bound(theta: f64) -> Result<f64, DomainError> {
    Ok(f1(theta)?.max(f2(theta)?))
}

/// Root of `f1 − f2` on `[2, 2.303]` by bisection. `f1 − f2` is decreasing there.
pub fn theta_star(tolerance: f64) -> f64 {
    let h = |t: f64| BoundCurve::F1.eval_unchecked(t) - BoundCurve::F2.eval_unchecked(t);
    let (mut lo, mut hi) = (2.0_f64, 2.303_f64);
    let tolerance = tolerance.max(f64::EPSILON);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = h(mid);
        if v == 0.0 {
            return mid;
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < tolerance && h(0.5 * (lo + hi)).abs() < tolerance {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Best competitive ratio `ρ* = f1(Θ*)`.
pub fn rho_star() -> f64 {
    BoundCurve::F1.eval_unchecked(theta_star(1e-15))
}

/// `349/247 + √84998/247 ≈ 2.5933`, where g3 is usually quoted as `≈ 3.01454`.
///
/// This is not where g3 attains its minimum on its interval; see [`g3_argmin`].
pub fn theta_hat() -> f64 {
    349.0 / 247.0 + 84998f64.sqrt() / 247.0
}

/// Minimizer of g3 on `(1+√2, 3)`: `(69 + √3398) / 47 ≈ 2.7083`, with `g3 ≈ 3.01337`.
pub fn g3_argmin() -> f64 {
    (69.0 + 3398f64.sqrt()) / 47.0
}

/// Golden-section search for the minimum of a unimodal function on `[lo, hi]`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tolerance: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tolerance {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}
