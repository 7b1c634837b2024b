//! Online Dial-a-Ride on the real line.
//!
//! The crate bundles an exact offline solver for `L(t, p, R)`, an event-driven simulator for
//! the online algorithms Smartstart and Ignore, the competitive-ratio curves of Smartstart, and
//! generators for the instance families on which those curves are attained.

pub mod adversary;
pub mod algorithms;
pub mod batch;
pub mod bounds;
pub mod model;
pub mod offline;
pub mod sim;

pub use adversary::{generate, FamilyError, FamilyKind, FamilyOptions, GeneratedFamily};
pub use algorithms::{AlgorithmSpec, OnlineAlgorithm};
pub use model::{Capacity, Instance, Request, Variant};
pub use offline::{opt, solve, SolverConfig, SolverQuery};
pub use sim::{run, simulate, SimResult};
