//! Batch drivers: random instances, the fuzz suite and family sweeps.
//!
//! Every batch is a list of independent cells. With the `parallel` feature the cells are spread
//! over the rayon pool; results always come back in input order.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::adversary::{generate, FamilyKind, FamilyOptions};
use crate::algorithms::AlgorithmSpec;
use crate::bounds::{f1, f2, upper_bound};
use crate::model::{verify_trajectory, Capacity, Instance, Request, Variant};
use crate::offline::{brute_force_solve, solve, SolverConfig, SolverError, SolverQuery, BRUTE_FORCE_LIMIT};
use crate::sim::{check_trace, run};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// `(0..n).map(f)`, possibly in parallel, in index order.
pub fn map_indexed<T, F>(n: usize, execution: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

fn coordinate(rng: &mut ChaCha8Rng, dyadic: bool, lo: f64, hi: f64) -> f64 {
    if dyadic {
        let steps = ((hi - lo) * 4.0) as i64;
        lo + rng.gen_range(0..=steps) as f64 / 4.0
    } else {
        rng.gen_range(lo..=hi)
    }
}

/// Up to `n_max` requests with endpoints in `[−2, 2]` and releases in `[0, 3]`.
///
/// About a third of the requests are points. Half of the seeds snap every value to a grid of
/// quarters so that ties show up.
pub fn random_requests(rng: &mut ChaCha8Rng, n_max: usize) -> Vec<Request> {
    let n = rng.gen_range(1..=n_max.max(1));
    let dyadic = rng.gen_bool(0.5);
    (0..n)
        .map(|id| {
            let a = coordinate(rng, dyadic, -2.0, 2.0);
            let b = if rng.gen_bool(0.3) { a } else { coordinate(rng, dyadic, -2.0, 2.0) };
            let r = coordinate(rng, dyadic, 0.0, 3.0);
            Request::new(id, a, b, r)
        })
        .collect()
}

fn random_capacity(rng: &mut ChaCha8Rng) -> Capacity {
    match rng.gen_range(0..3) {
        0 => Capacity::Finite(1),
        1 => Capacity::Finite(2),
        _ => Capacity::Unbounded,
    }
}

/// A random instance; variant and capacity are drawn from the seed as well.
pub fn random_instance(seed: u64, n_max: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let variant = if rng.gen_bool(0.5) { Variant::Open } else { Variant::Closed };
    let capacity = random_capacity(&mut rng);
    let requests = random_requests(&mut rng, n_max);
    Instance { requests, capacity, variant }
}

/// A random query `L(t, p, R)` with `t ∈ [0, 3]` and `p ∈ [−2, 2]`.
pub fn random_query(seed: u64, n_max: usize) -> SolverQuery {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let variant = if rng.gen_bool(0.5) { Variant::Open } else { Variant::Closed };
    let capacity = random_capacity(&mut rng);
    let requests = random_requests(&mut rng, n_max);
    let t = coordinate(&mut rng, false, 0.0, 3.0);
    let p = coordinate(&mut rng, false, -2.0, 2.0);
    SolverQuery::new(t, p, requests, capacity, variant)
}

/// Parameters of one fuzz run. Case `i` uses seed `base_seed + i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FuzzConfig {
    pub cases: u64,
    pub base_seed: u64,
    pub n_max: usize,
    pub thetas: Vec<f64>,
    pub solver: SolverConfig,
    pub execution: Execution,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            cases: 500,
            base_seed: 0,
            n_max: 5,
            thetas: vec![1.5, crate::bounds::theta_star(1e-12), 3.0],
            solver: SolverConfig::default(),
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FuzzCheck {
    OracleMismatch,
    InvalidTrajectory,
    LemmaViolation,
    RatioAboveBound,
    IgnoreAboveFour,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FuzzFailure {
    pub seed: u64,
    pub check: FuzzCheck,
    pub algorithm: Option<String>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FuzzReport {
    pub cases: u64,
    pub oracle_comparisons: usize,
    pub simulations: usize,
    /// Largest open-variant ratio seen per Θ, in the order of `FuzzConfig::thetas`.
    pub max_ratio: Vec<(f64, f64)>,
    pub max_ignore_ratio: f64,
    pub failures: Vec<FuzzFailure>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct CaseOutcome {
    comparisons: usize,
    simulations: usize,
    ratios: Vec<f64>,
    ignore_ratio: f64,
    failures: Vec<FuzzFailure>,
}

/// Runs the fuzz suite with the branch-and-bound solver.
pub fn fuzz(config: &FuzzConfig) -> FuzzReport {
    fuzz_with(config, |q, c| solve(q, c).map(|s| s.length))
}

/// Runs the fuzz suite, comparing `solver` against the brute-force oracle.
pub fn fuzz_with<S>(config: &FuzzConfig, solver: S) -> FuzzReport
where
    S: Fn(&SolverQuery, &SolverConfig) -> Result<f64, SolverError> + Sync + Send,
{
    let outcomes = map_indexed(config.cases as usize, config.execution, |i| {
        fuzz_case(config, config.base_seed.wrapping_add(i as u64), &solver)
    });
    let mut report = FuzzReport {
        cases: config.cases,
        oracle_comparisons: 0,
        simulations: 0,
        max_ratio: config.thetas.iter().map(|&t| (t, 0.0)).collect(),
        max_ignore_ratio: 0.0,
        failures: Vec::new(),
    };
    for o in outcomes {
        report.oracle_comparisons += o.comparisons;
        report.simulations += o.simulations;
        for (slot, r) in report.max_ratio.iter_mut().zip(o.ratios) {
            slot.1 = slot.1.max(r);
        }
        report.max_ignore_ratio = report.max_ignore_ratio.max(o.ignore_ratio);
        report.failures.extend(o.failures);
    }
    report
}

fn fuzz_case<S>(config: &FuzzConfig, seed: u64, solver: &S) -> CaseOutcome
where
    S: Fn(&SolverQuery, &SolverConfig) -> Result<f64, SolverError>,
{
    let tol = config.solver.tolerance;
    let mut out = CaseOutcome {
        comparisons: 0,
        simulations: 0,
        ratios: vec![0.0; config.thetas.len()],
        ignore_ratio: 0.0,
        failures: Vec::new(),
    };
    let mut fail =
        |check, algorithm: Option<String>, detail: String| out.failures.push(FuzzFailure { seed, check, algorithm, detail });

    let instance = random_instance(seed, config.n_max);
    for query in [SolverQuery::for_instance(&instance), random_query(seed, config.n_max)] {
        if query.requests.len() > BRUTE_FORCE_LIMIT {
            continue;
        }
        out.comparisons += 1;
        match (solver(&query, &config.solver), brute_force_solve(&query)) {
            (Ok(got), Ok(want)) if (got - want).abs() <= tol => {}
            (Ok(got), Ok(want)) => fail(
                FuzzCheck::OracleMismatch,
                None,
                format!("L({}, {}, ·) = {got}, oracle says {want}", query.start_time, query.start_pos),
            ),
            (a, b) => fail(FuzzCheck::Error, None, format!("solver {a:?}, oracle {b:?}")),
        }
    }

    let specs = config.thetas.iter().map(|&theta| AlgorithmSpec::Smartstart { theta }).chain([AlgorithmSpec::Ignore]);
    let mut ratios = Vec::with_capacity(config.thetas.len());
    for spec in specs {
        out.simulations += 1;
        let name = Some(spec.to_string());
        let res = match run(&instance, &spec, &config.solver) {
            Ok(res) => res,
            Err(e) => {
                fail(FuzzCheck::Error, name, e.to_string());
                continue;
            }
        };
        if let Err(v) = verify_trajectory(&instance, &res.trajectory, tol) {
            fail(FuzzCheck::InvalidTrajectory, name.clone(), v.to_string());
        }
        match spec {
            AlgorithmSpec::Smartstart { theta } => {
                match check_trace(&res, &instance, theta, &config.solver) {
                    Ok(v) if v.is_empty() => {}
                    Ok(v) => fail(FuzzCheck::LemmaViolation, name.clone(), format!("{v:?}")),
                    Err(e) => fail(FuzzCheck::Error, name.clone(), e.to_string()),
                }
                if instance.variant == Variant::Open {
                    let bound = upper_bound(theta).unwrap_or(f64::INFINITY);
                    if res.ratio > bound + tol {
                        fail(FuzzCheck::RatioAboveBound, name, format!("ratio {} > {bound}", res.ratio));
                    }
                    ratios.push(res.ratio);
                } else {
                    ratios.push(0.0);
                }
            }
            AlgorithmSpec::Ignore => {
                if res.ratio > 4.0 + tol {
                    fail(FuzzCheck::IgnoreAboveFour, name, format!("ratio {}", res.ratio));
                }
                out.ignore_ratio = res.ratio;
            }
        }
    }
    out.ratios.iter_mut().zip(ratios).for_each(|(slot, r)| *slot = r);
    out
}

/// One grid point of a family sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub family: FamilyKind,
    pub eps: f64,
    pub simulated_ratio: Option<f64>,
    pub expected_ratio: Option<f64>,
    pub f1: Option<f64>,
    pub f2: Option<f64>,
    pub pass: bool,
    pub error: Option<String>,
}

pub const SWEEP_CSV_HEADER: &str = "theta,family,eps,simulated_ratio,expected_ratio,f1,f2,pass,error";

fn fixed(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.12}")).unwrap_or_default()
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        let error = self.error.as_deref().unwrap_or("").replace('"', "'");
        let error = if error.contains(',') { format!("\"{error}\"") } else { error };
        format!(
            "{:.12},{},{:.12},{},{},{},{},{},{}",
            self.theta,
            self.family,
            self.eps,
            fixed(self.simulated_ratio),
            fixed(self.expected_ratio),
            fixed(self.f1),
            fixed(self.f2),
            self.pass,
            error
        )
    }
}

/// The whole sweep as CSV, header included.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.to_csv());
    }
    out
}

/// Generates and simulates the family at every Θ of the grid. Rows are sorted by Θ.
///
/// A row passes when the simulated ratio is within `tolerance` of the expected one. Domain
/// errors become failing rows; the sweep carries on.
pub fn sweep(
    kind: FamilyKind,
    thetas: &[f64],
    eps: f64,
    opts: &FamilyOptions,
    solver: &SolverConfig,
    tolerance: f64,
    execution: Execution,
) -> Vec<SweepRow> {
    let mut grid = thetas.to_vec();
    grid.sort_by(f64::total_cmp);
    map_indexed(grid.len(), execution, |i| {
        let theta = grid[i];
        let mut row = SweepRow {
            theta,
            family: kind,
            eps,
            simulated_ratio: None,
            expected_ratio: None,
            f1: f1(theta).ok(),
            f2: f2(theta).ok(),
            pass: false,
            error: None,
        };
        let family = match generate(kind, theta, eps, opts) {
            Ok(f) => f,
            Err(e) => {
                row.error = Some(e.to_string());
                return row;
            }
        };
        row.expected_ratio = Some(family.expected_ratio());
        match run(&family.instance, &family.target(), solver) {
            Ok(res) => {
                row.simulated_ratio = Some(res.ratio);
                row.pass = (res.ratio - family.expected_ratio()).abs() < tolerance;
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        row
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;

    #[test]
    fn random_instances_are_valid_and_reproducible() {
        for seed in 0..50 {
            let inst = random_instance(seed, 6);
            assert!(validate(&inst).is_empty());
            assert!((1..=6).contains(&inst.len()));
            assert_eq!(inst, random_instance(seed, 6));
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let f = |i: usize| i * i;
        assert_eq!(map_indexed(100, Execution::Sequential, f), map_indexed(100, Execution::Parallel, f));
    }

    #[test]
    fn small_fuzz_run_passes() {
        let cfg = FuzzConfig { cases: 20, n_max: 4, ..FuzzConfig::default() };
        let report = fuzz(&cfg);
        assert!(report.passed(), "{:?}", report.failures);
        assert_eq!(report.oracle_comparisons, 40);
        assert_eq!(report.simulations, 80);
    }

    #[test]
    fn corrupted_solver_is_reported_with_its_seed() {
        let cfg = FuzzConfig { cases: 5, base_seed: 77, n_max: 3, ..FuzzConfig::default() };
        let report = fuzz_with(&cfg, |q, c| solve(q, c).map(|s| s.length + 0.5));
        let seeds: Vec<u64> = report.failures.iter().filter(|f| f.check == FuzzCheck::OracleMismatch).map(|f| f.seed).collect();
        assert!(!seeds.is_empty());
        assert!(seeds.iter().all(|s| (77..82).contains(s)));
    }

    #[test]
    fn sweep_rows_are_sorted_and_keep_domain_errors() {
        let rows = sweep(
            FamilyKind::Closed,
            &[2.5, 1.5, 0.5],
            0.05,
            &FamilyOptions::default(),
            &SolverConfig::default(),
            1e-9,
            Execution::Sequential,
        );
        let thetas: Vec<f64> = rows.iter().map(|r| r.theta).collect();
        assert_eq!(thetas, vec![0.5, 1.5, 2.5]);
        assert!(!rows[0].pass && rows[0].error.is_some());
        assert!(rows[1].pass && rows[2].pass);
        let csv = sweep_csv(&rows);
        assert!(csv.starts_with(SWEEP_CSV_HEADER));
        assert!(csv.lines().nth(2).unwrap().starts_with("1.500000000000,closed,0.050000000000,3.000000000000,"));
    }
}
