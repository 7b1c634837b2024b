use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use line_darp::adversary::{generate, FamilyError, FamilyKind, FamilyOptions, DEFAULT_MAX_LURE};
use line_darp::algorithms::AlgorithmSpec;
use line_darp::batch::{fuzz, sweep, sweep_csv, Execution, FuzzConfig};
use line_darp::bounds::{f1, f2, rho_star, theta_star, upper_bound, BoundCurve};
use line_darp::model::{instance_from_json, instance_to_json, Capacity, Instance, DEFAULT_TOLERANCE};
use line_darp::offline::{solve, solve_by_refinement, SolverConfig, SolverError, SolverQuery, MAX_SEARCH_REQUESTS};
use line_darp::sim::{check_trace, run, SimError};

/// Online Dial-a-Ride on the line.
#[derive(Parser)]
#[command(name = "line-darp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shortest schedule L(t, p, R) for the requests of an instance.
    Solve(SolveArgs),
    /// Run an online algorithm on an instance and print the result as JSON.
    Simulate(SimulateArgs),
    /// Write an instance family and its expected values.
    Generate(GenerateArgs),
    /// Simulate a family over a grid of Θ values and print CSV.
    Sweep(SweepArgs),
    /// Fuzz the solver and the algorithms on random instances.
    Verify(VerifyArgs),
    /// Tabulate the ratio curves.
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct SolverArgs {
    /// Largest request set the exact search accepts.
    #[arg(long, default_value_t = 12)]
    max_requests: usize,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, CliError> {
        if self.max_requests > MAX_SEARCH_REQUESTS {
            return Err(CliError::Input(format!("--max-requests cannot exceed {MAX_SEARCH_REQUESTS}")));
        }
        Ok(SolverConfig { max_requests: self.max_requests, tolerance: tolerance()?, ..SolverConfig::default() })
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Start time.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t: f64,
    /// Start position.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    p: f64,
    /// Allow instances beyond the size limit when most requests are points.
    #[arg(long)]
    refine: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct SimulateArgs {
    instance: PathBuf,
    /// `smartstart:Θ=<value>` or `ignore`.
    #[arg(long)]
    algo: AlgorithmSpec,
    /// Also check the per-schedule lemmas (Smartstart only); violations exit with 1.
    #[arg(long)]
    check_trace: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct FamilyArgs {
    /// waiting, nowait, g1, g2, g3, g4, closed or ignore.
    #[arg(long)]
    family: FamilyKind,
    #[arg(long)]
    eps: f64,
    /// Server capacity: a positive integer or `inf`.
    #[arg(long, default_value = "1")]
    capacity: Capacity,
    /// Longest lure prefix to emit.
    #[arg(long, default_value_t = DEFAULT_MAX_LURE)]
    max_lure: usize,
}

impl FamilyArgs {
    fn options(&self) -> FamilyOptions {
        FamilyOptions { capacity: self.capacity, max_lure: self.max_lure }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Not needed for the Ignore family.
    #[arg(long)]
    theta: Option<f64>,
    /// Instance file; expected values go next to it as `<stem>.expected.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// `lo:hi:step` (inclusive) or a comma-separated list.
    #[arg(long)]
    theta_grid: String,
    /// Run grid points one after another.
    #[arg(long)]
    sequential: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Number of random instances.
    #[arg(long, default_value_t = 500)]
    seeds: u64,
    /// Most requests per instance (at most 6).
    #[arg(long, default_value_t = 5)]
    n_max: usize,
    /// First seed; instance i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Θ values for Smartstart, comma-separated. Defaults to 1.5, Θ* and 3.
    #[arg(long, value_delimiter = ',')]
    theta: Vec<f64>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, default_value_t = 1.1)]
    from: f64,
    #[arg(long, default_value_t = 4.0)]
    to: f64,
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    /// Print Θ* and ρ* instead of the table.
    #[arg(long)]
    optimum: bool,
}

#[derive(Debug)]
enum CliError {
    Failed(String),
    Input(String),
    Limit(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Input(_) => 2,
            CliError::Limit(_) => 3,
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::TooLarge { .. } => CliError::Limit(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        if e.is_resource_limit() {
            CliError::Limit(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::LureTooLong { .. } => CliError::Limit(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

fn tolerance() -> Result<f64, CliError> {
    match std::env::var("LINE_DARP_TOL") {
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
            _ => Err(CliError::Input(format!("LINE_DARP_TOL={v:?} is not a positive number"))),
        },
        Err(_) => Ok(DEFAULT_TOLERANCE),
    }
}

fn read_instance(path: &Path) -> Result<Instance, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    instance_from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Input(format!("bad Θ grid {spec:?}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [lo, hi, step] => {
            let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
            if !(step > 0.0 && hi >= lo) {
                return Err(bad());
            }
            let n = ((hi - lo) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| lo + i as f64 * step).collect())
        }
        [_] => spec.split(',').map(num).collect(),
        _ => Err(bad()),
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let instance = read_instance(&args.instance)?;
    let config = args.solver.config()?;
    let query = SolverQuery::for_instance(&instance).at(args.t, args.p);
    let schedule = if args.refine && instance.len() > config.max_requests {
        solve_by_refinement(&query, &config)?
    } else {
        solve(&query, &config)?
    };
    println!("length {}", schedule.length);
    let actions: Vec<String> = schedule.actions.iter().map(ToString::to_string).collect();
    println!("actions {}", actions.join(" "));
    println!("end_pos {}", schedule.end_pos);
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let instance = read_instance(&args.instance)?;
    let config = args.solver.config()?;
    let result = run(&instance, &args.algo, &config)?;
    println!("{}", serde_json::to_string_pretty(&result).expect("results serialize"));
    if args.check_trace {
        let theta = args.algo.theta().ok_or_else(|| CliError::Input("--check-trace needs a Smartstart algorithm".into()))?;
        let violations = check_trace(&result, &instance, theta, &config)?;
        if !violations.is_empty() {
            return Err(CliError::Failed(format!("lemma violations: {violations:?}")));
        }
    }
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "instance".into());
    out.with_file_name(format!("{stem}.expected.json"))
}

fn cmd_generate(args: &GenerateArgs) -> Result<(), CliError> {
    let theta = match (args.family.family, args.theta) {
        (_, Some(t)) => t,
        (FamilyKind::Ignore, None) => f64::NAN,
        (_, None) => return Err(CliError::Input("--theta is required for this family".into())),
    };
    let fam = generate(args.family.family, theta, args.family.eps, &args.family.options())?;
    let sidecar = sidecar_path(&args.out);
    write_file(&args.out, &instance_to_json(&fam.instance))?;
    write_file(&sidecar, &(serde_json::to_string_pretty(&fam.expectation).expect("expectations serialize") + "\n"))?;
    println!("wrote {} ({} requests) and {}", args.out.display(), fam.instance.len(), sidecar.display());
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let grid = parse_grid(&args.theta_grid)?;
    let config = args.solver.config()?;
    let rows = sweep(
        args.family.family,
        &grid,
        args.family.eps,
        &args.family.options(),
        &config,
        config.tolerance,
        execution(args.sequential),
    );
    print!("{}", sweep_csv(&rows));
    let failed = rows.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} of {} grid points failed", rows.len())));
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    if !(1..=6).contains(&args.n_max) {
        return Err(CliError::Input("--n-max must be between 1 and 6".into()));
    }
    let mut config = FuzzConfig {
        cases: args.seeds,
        base_seed: args.seed,
        n_max: args.n_max,
        solver: SolverConfig::default().with_tolerance(tolerance()?),
        execution: execution(args.sequential),
        ..FuzzConfig::default()
    };
    if !args.theta.is_empty() {
        if let Some(&bad) = args.theta.iter().find(|t| !(t.is_finite() && **t > 1.0)) {
            return Err(CliError::Input(format!("Θ must exceed 1, got {bad}")));
        }
        config.thetas = args.theta.clone();
    }
    let report = fuzz(&config);
    println!("cases {}", report.cases);
    println!("oracle comparisons {}", report.oracle_comparisons);
    println!("simulations {}", report.simulations);
    for (theta, ratio) in &report.max_ratio {
        let bound = upper_bound(*theta).map(|b| format!("{b:.12}")).unwrap_or_else(|_| "-".into());
        println!("max ratio smartstart:Θ={theta} {ratio:.12} (bound {bound})");
    }
    println!("max ratio ignore {:.12} (bound 4)", report.max_ignore_ratio);
    for f in &report.failures {
        println!("FAIL seed {} {:?} {}: {}", f.seed, f.check, f.algorithm.as_deref().unwrap_or("solver"), f.detail);
    }
    if report.passed() {
        println!("all checks passed");
        Ok(())
    } else {
        Err(CliError::Failed(format!("{} failures", report.failures.len())))
    }
}

fn cmd_bounds(args: &BoundsArgs) -> Result<(), CliError> {
    if args.optimum {
        let t = theta_star(1e-12);
        println!("theta_star {t:.12}");
        println!("rho_star {:.12}", rho_star());
        return Ok(());
    }
    let lo = args.from.max(1.0 + f64::EPSILON);
    let grid = parse_grid(&format!("{lo}:{}:{}", args.to, args.step))?;
    println!("theta,f1,f2,upper,lower,lower_curve");
    for t in grid {
        let cell = |v: Option<f64>| v.map(|x| format!("{x:.12}")).unwrap_or_default();
        let lower = BoundCurve::lower_for(t);
        println!(
            "{t:.12},{},{},{},{},{}",
            cell(f1(t).ok()),
            cell(f2(t).ok()),
            cell(upper_bound(t).ok()),
            cell(lower.and_then(|c| c.eval(t).ok())),
            lower.map(|c| c.to_string()).unwrap_or_default()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bounds(a) => cmd_bounds(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::Failed(msg) | CliError::Input(msg) | CliError::Limit(msg)) = &e;
            eprintln!("error: {msg}");
            ExitCode::from(e.code())
        }
    }
}
