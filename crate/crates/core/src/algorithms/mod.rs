//! Online algorithms driven by the simulator.

mod ignore;
mod smartstart;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Capacity, Request, Variant};
use crate::offline::{SolvedSchedule, SolverConfig, SolverError};

pub use ignore::Ignore;
pub use smartstart::{smartstart_next_start, Smartstart, SmartstartConfig};

/// What the simulator lets an algorithm see when it asks for a decision.
#[derive(Clone, Copy, Debug)]
pub struct DecisionView<'a> {
    pub now: f64,
    pub position: f64,
    /// Released requests not yet served, in release order.
    pub pending: &'a [Request],
    pub capacity: Capacity,
    pub variant: Variant,
    pub solver: &'a SolverConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decision {
    /// Execute this schedule now, ignoring releases until it completes.
    Start(SolvedSchedule),
    /// Ask again at this time, or earlier if a request is released first.
    WaitUntil(f64),
    /// Nothing to do until the next release.
    Idle,
}

pub trait OnlineAlgorithm {
    fn name(&self) -> String;

    fn on_release(&mut self, _time: f64, _request: &Request) {}

    fn next_decision(&mut self, view: &DecisionView<'_>) -> Result<Decision, AlgorithmError>;
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum AlgorithmError {
    #[error("unknown algorithm {0:?}; expected \"smartstart:Θ=<value>\" or \"ignore\"")]
    UnknownSpec(String),
    #[error("Θ must be a finite number greater than 1, got {0}")]
    BadTheta(f64),
    #[error("no released requests to schedule")]
    NothingPending,
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// A registered algorithm, as selected on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "name")]
pub enum AlgorithmSpec {
    Smartstart { theta: f64 },
    Ignore,
}

impl AlgorithmSpec {
    pub fn build(&self) -> Result<Box<dyn OnlineAlgorithm + Send>, AlgorithmError> {
        Ok(match *self {
            AlgorithmSpec::Smartstart { theta } => Box::new(Smartstart::new(SmartstartConfig::new(theta)?)),
            AlgorithmSpec::Ignore => Box::new(Ignore),
        })
    }

    pub fn theta(&self) -> Option<f64> {
        match self {
            AlgorithmSpec::Smartstart { theta } => Some(*theta),
            AlgorithmSpec::Ignore => None,
        }
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgorithmSpec::Smartstart { theta } => write!(f, "smartstart:Θ={theta}"),
            AlgorithmSpec::Ignore => f.write_str("ignore"),
        }
    }
}

impl FromStr for AlgorithmSpec {
    type Err = AlgorithmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("ignore") {
            return Ok(AlgorithmSpec::Ignore);
        }
        let unknown = || AlgorithmError::UnknownSpec(s.to_string());
        let rest = s.strip_prefix("smartstart:").ok_or_else(unknown)?;
        let value = ["Θ=", "θ=", "theta=", "Theta="].iter().find_map(|p| rest.strip_prefix(p)).unwrap_or(rest);
        let theta: f64 = value.parse().map_err(|_| unknown())?;
        SmartstartConfig::new(theta)?;
        Ok(AlgorithmSpec::Smartstart { theta })
    }
}
