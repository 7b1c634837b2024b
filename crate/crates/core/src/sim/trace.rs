use serde::Serialize;

use super::SimResult;
use crate::model::{request_extents, Instance, Request};
use crate::offline::{solve, solve_by_refinement, SolverConfig, SolverError, SolverQuery};

/// Structural facts every Smartstart trace satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Lemma {
    /// (a) `t_j ≥ |p_{j+1}| / Θ`.
    StartAfterEndpoint,
    /// (b) `L(t_j, p_j, σ_{S_j}) ≤ (1 + Θ/(Θ+2)) Opt`.
    ScheduleLength,
    /// (c) `L(t_j, 0, σ_{S_j}) ≤ |min(0, y−)| + max(0, y+) + y`.
    FromOrigin,
    /// (d) `L(t_j, max(0, y−) + min(0, y+), σ_{S_j}) ≤ y+ − y− + y`.
    FromNearSide,
    /// (e) no point beyond `|p_j| + |p_j − p_{j+1}| + y − |min(0, y−)|` is visited (mirrored if needed).
    FarthestPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaViolation {
    pub schedule: usize,
    pub lemma: Lemma,
    pub lhs: f64,
    pub rhs: f64,
}

fn length(query: &SolverQuery, config: &SolverConfig) -> Result<f64, SolverError> {
    let s = if query.requests.len() <= config.max_requests { solve(query, config)? } else { solve_by_refinement(query, config)? };
    Ok(s.length)
}

/// Checks lemmas (a) through (e) on every schedule of a Smartstart(Θ) run.
pub fn check_trace(
    result: &SimResult,
    instance: &Instance,
    theta: f64,
    config: &SolverConfig,
) -> Result<Vec<LemmaViolation>, SolverError> {
    let tol = config.tolerance;
    let mut out = Vec::new();
    let Ok(x) = request_extents(&instance.requests, true) else { return Ok(out) };
    let opt = result.opt_cost;
    let y = opt - x.x_minus.abs() - x.x_plus;
    for rec in &result.schedules {
        let mut check = |lemma: Lemma, lhs: f64, rhs: f64| {
            if lhs > rhs + tol {
                out.push(LemmaViolation { schedule: rec.index, lemma, lhs, rhs });
            }
        };
        let t = rec.start_time;
        check(Lemma::StartAfterEndpoint, rec.end_pos.abs() / theta, t);
        check(Lemma::ScheduleLength, rec.length, (1.0 + theta / (theta + 2.0)) * opt);

        let served: Vec<Request> = rec.served.iter().map(|&id| instance.requests[id]).collect();
        let Ok(ys) = request_extents(&served, false) else { continue };
        let (ym, yp) = (ys.x_minus, ys.x_plus);
        let query = SolverQuery::new(t, 0.0, served, instance.capacity, instance.variant);
        check(Lemma::FromOrigin, length(&query, config)?, ym.min(0.0).abs() + yp.max(0.0) + y);
        let near = ym.max(0.0) + yp.min(0.0);
        check(Lemma::FromNearSide, length(&query.at(t, near), config)?, yp - ym + y);

        let Some((lo, hi)) = result.trajectory.visited_range(t, rec.end_time()) else { continue };
        let reach = rec.start_pos.abs() + (rec.start_pos - rec.end_pos).abs() + y;
        if x.x_minus.abs() <= x.x_plus + tol {
            check(Lemma::FarthestPoint, hi, reach - ym.min(0.0).abs());
        }
        if x.x_minus.abs() + tol >= x.x_plus {
            check(Lemma::FarthestPoint, -lo, reach - yp.max(0.0));
        }
    }
    Ok(out)
}
