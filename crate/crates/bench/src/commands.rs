use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use radial_core::{
    load_problem_file, radial_subgradient_run, renegar_a_run, renegar_b_run, LineSearchConfig, ProblemInstance,
    RunStatus, RunTrace, SolverConfig, StepPolicy,
};

use crate::bounds::{
    eps_target_bound, known_optimum_bound, renegar_a_bound, renegar_b_bound, BoundCheckReport, Theorem,
};
use crate::report::{write_json, ConfigEcho, RunReport};
use crate::trace_csv::{format_real, write_trace_csv};

pub const DEFAULT_MAX_ITERS: usize = 10_000;

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_UNBOUNDED: u8 = 2;
pub const EXIT_BOUND_FAILED: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Radial,
    RenegarA,
    RenegarB,
}

impl Algorithm {
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Radial => "radial",
            Algorithm::RenegarA => "renegar-a",
            Algorithm::RenegarB => "renegar-b",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyKind {
    Sqsum,
    EpsTarget,
    KnownOpt,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Problem description (JSON).
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long, value_enum, default_value_t = Algorithm::Radial)]
    pub algorithm: Algorithm,
    /// Step-size rule for the radial method.
    #[arg(long, value_enum, default_value_t = PolicyKind::Sqsum)]
    pub policy: PolicyKind,
    /// Target relative accuracy.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Scale of the harmonic schedule `β₀/(i + 1)`.
    #[arg(long, default_value_t = 1.0)]
    pub beta0: f64,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    pub gamma_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub gamma_min: f64,
    /// Where to write the per-iteration CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Where to write the JSON report.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

impl RunArgs {
    pub fn new(problem: impl Into<PathBuf>) -> Self {
        RunArgs {
            problem: problem.into(),
            algorithm: Algorithm::Radial,
            policy: PolicyKind::Sqsum,
            epsilon: None,
            beta0: 1.0,
            max_iters: None,
            gamma_tol: 1e-10,
            gamma_min: 1e-12,
            trace: None,
            report: None,
        }
    }

    fn line_search(&self) -> Result<LineSearchConfig> {
        let ls = LineSearchConfig {
            gamma_tol: self.gamma_tol,
            gamma_min: self.gamma_min,
            ..LineSearchConfig::default()
        };
        ls.validate()?;
        Ok(ls)
    }

    fn require_epsilon(&self) -> Result<f64> {
        let eps = self
            .epsilon
            .ok_or_else(|| anyhow!("--epsilon is required for this run"))?;
        if !(eps > 0.0 && eps.is_finite()) {
            bail!("--epsilon must be positive, got {eps}");
        }
        Ok(eps)
    }
}

fn require(value: Option<f64>, field: &str) -> Result<f64> {
    value.ok_or_else(|| anyhow!("problem metadata is missing `{field}`"))
}

/// A finished run together with the settings it used.
#[derive(Debug, Clone)]
pub struct Execution {
    pub trace: RunTrace,
    pub config: ConfigEcho,
    pub policy: Option<&'static str>,
    pub wall_time_s: f64,
}

/// Runs `algorithm` on `problem` for at most `max_iters` iterations.
pub fn execute(
    problem: &ProblemInstance,
    algorithm: Algorithm,
    args: &RunArgs,
    max_iters: usize,
    target_epsilon: Option<f64>,
) -> Result<Execution> {
    let cfg = SolverConfig {
        max_iters,
        target_epsilon,
        line_search: args.line_search()?,
    };
    let f_star = problem.metadata().f_star;
    let start = Instant::now();
    let (trace, policy, beta0) = match algorithm {
        Algorithm::Radial => {
            let policy = match args.policy {
                PolicyKind::Sqsum => {
                    if !(args.beta0 > 0.0 && args.beta0.is_finite()) {
                        bail!("--beta0 must be positive, got {}", args.beta0);
                    }
                    StepPolicy::harmonic(args.beta0)
                }
                PolicyKind::EpsTarget => StepPolicy::epsilon_target(args.require_epsilon()?)?,
                PolicyKind::KnownOpt => StepPolicy::known_optimum(require(f_star, "f_star")?)?,
            };
            let beta0 = matches!(args.policy, PolicyKind::Sqsum).then_some(args.beta0);
            (
                radial_subgradient_run(problem, &policy, &cfg)?,
                Some(policy.name()),
                beta0,
            )
        }
        Algorithm::RenegarA => (renegar_a_run(problem, args.require_epsilon()?, &cfg)?, None, None),
        Algorithm::RenegarB => (renegar_b_run(problem, require(f_star, "f_star")?, &cfg)?, None, None),
    };
    let wall_time_s = start.elapsed().as_secs_f64();
    Ok(Execution {
        trace,
        config: ConfigEcho {
            max_iters,
            epsilon: args.epsilon,
            beta0,
            target_epsilon,
            gamma_tol: args.gamma_tol,
            gamma_min: args.gamma_min,
        },
        policy,
        wall_time_s,
    })
}

fn load(path: &Path) -> Result<ProblemInstance> {
    load_problem_file(path).map_err(|e| anyhow!(e))
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub trace: RunTrace,
    pub report: RunReport,
}

impl SolveOutcome {
    pub fn exit_code(&self) -> u8 {
        match self.trace.status {
            RunStatus::MaxIters | RunStatus::TargetReached => EXIT_OK,
            RunStatus::UnboundedDetected { .. } => EXIT_UNBOUNDED,
            RunStatus::NumericalStall { .. } => EXIT_ERROR,
        }
    }
}

/// Default iteration budget: the ε-target guarantee when the geometry is
/// known, a flat cap otherwise.
fn default_max_iters(problem: &ProblemInstance, args: &RunArgs) -> usize {
    let meta = problem.metadata();
    match (
        args.algorithm,
        args.policy,
        meta.dist_to_opt,
        meta.radius_r,
        args.epsilon,
    ) {
        (Algorithm::Radial, PolicyKind::EpsTarget, Some(dist), Some(r), Some(eps)) if eps > 0.0 => {
            eps_target_bound(dist, r, eps)
        }
        _ => DEFAULT_MAX_ITERS,
    }
}

pub fn solve(args: &RunArgs) -> Result<SolveOutcome> {
    let problem = load(&args.problem)?;
    let max_iters = args.max_iters.unwrap_or_else(|| default_max_iters(&problem, args));
    let target = args.epsilon.filter(|_| problem.metadata().f_star.is_some());
    let run = execute(&problem, args.algorithm, args, max_iters, target)?;
    let report = RunReport::new(
        problem.id(),
        args.algorithm.label(),
        run.policy,
        run.config,
        &run.trace,
        run.wall_time_s,
    );
    if let Some(path) = &args.trace {
        write_trace_csv(&run.trace, problem.dimension(), path)?;
    }
    if let Some(path) = &args.report {
        write_json(&report, path)?;
    }
    Ok(SolveOutcome {
        trace: run.trace,
        report,
    })
}

pub fn theorem_for(algorithm: Algorithm, policy: PolicyKind) -> Result<Theorem> {
    match (algorithm, policy) {
        (Algorithm::Radial, PolicyKind::EpsTarget) => Ok(Theorem::EpsTarget),
        (Algorithm::Radial, PolicyKind::KnownOpt) => Ok(Theorem::KnownOptimum),
        (Algorithm::Radial, PolicyKind::Sqsum) => {
            bail!("the square-summable policy has no finite iteration bound; use eps-target or known-opt")
        }
        (Algorithm::RenegarA, _) => Ok(Theorem::RenegarA),
        (Algorithm::RenegarB, _) => Ok(Theorem::RenegarB),
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub report: BoundCheckReport,
    pub trace: RunTrace,
    pub wall_time_s: f64,
}

impl VerifyOutcome {
    pub fn exit_code(&self) -> u8 {
        if self.report.passed {
            EXIT_OK
        } else {
            EXIT_BOUND_FAILED
        }
    }
}

/// Computes the selected guarantee from the problem metadata and runs the
/// matching algorithm for exactly that many iterations.
pub fn verify_bounds(args: &RunArgs) -> Result<VerifyOutcome> {
    let problem = load(&args.problem)?;
    verify_bounds_on(&problem, args)
}

pub fn verify_bounds_on(problem: &ProblemInstance, args: &RunArgs) -> Result<VerifyOutcome> {
    let theorem = theorem_for(args.algorithm, args.policy)?;
    let eps = args.require_epsilon()?;
    let meta = problem.metadata();
    require(meta.f_star, "f_star")?;
    let r = require(meta.radius_r, "radius_R")?;
    let bound = match theorem {
        Theorem::EpsTarget => eps_target_bound(require(meta.dist_to_opt, "dist_to_opt")?, r, eps),
        Theorem::KnownOptimum => known_optimum_bound(require(meta.dist_to_opt, "dist_to_opt")?, r, eps),
        Theorem::RenegarA => renegar_a_bound(require(meta.diameter_d, "diameter_D")?, r, eps),
        Theorem::RenegarB => {
            if eps >= 1.0 {
                bail!("this bound needs --epsilon below 1, got {eps}");
            }
            renegar_b_bound(require(meta.diameter_d, "diameter_D")?, r, eps)
        }
    };
    let run = execute(problem, args.algorithm, args, bound, None)?;
    let report = BoundCheckReport::new(theorem, eps, bound, run.trace.achieved_iteration(eps));
    if let Some(path) = &args.trace {
        write_trace_csv(&run.trace, problem.dimension(), path)?;
    }
    if let Some(path) = &args.report {
        write_json(&report, path)?;
    }
    Ok(VerifyOutcome {
        report,
        trace: run.trace,
        wall_time_s: run.wall_time_s,
    })
}

#[derive(Debug, Clone)]
pub struct CompareOutcome {
    pub reports: Vec<RunReport>,
    pub rows: usize,
}

pub const COMPARE_COLUMNS: [&str; 4] = ["iter", "radial", "renegar_a", "renegar_b"];

/// Runs the radial method and both baselines side by side and tabulates
/// relative accuracy per iteration.
pub fn compare<W: Write>(args: &RunArgs, out: W) -> Result<CompareOutcome> {
    let problem = load(&args.problem)?;
    require(problem.metadata().f_star, "f_star")?;
    let eps = args.require_epsilon()?;
    let max_iters = args.max_iters.unwrap_or(DEFAULT_MAX_ITERS);
    let algorithms = [Algorithm::Radial, Algorithm::RenegarA, Algorithm::RenegarB];
    let runs: Vec<Result<Execution>> = std::thread::scope(|s| {
        let handles: Vec<_> = algorithms
            .iter()
            .map(|&alg| {
                let problem = &problem;
                s.spawn(move || execute(problem, alg, args, max_iters, Some(eps)))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(anyhow!("solver thread panicked"))))
            .collect()
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;

    let rows = runs.iter().map(|r| r.trace.records.len()).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COMPARE_COLUMNS)?;
    for i in 0..rows {
        let mut row = vec![i.to_string()];
        for run in &runs {
            let cell = run.trace.records.get(i).and_then(|r| r.rel_accuracy).map(format_real);
            row.push(cell.unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    w.flush().context("cannot write comparison table")?;

    let reports: Vec<RunReport> = algorithms
        .iter()
        .zip(runs)
        .map(|(alg, run)| {
            RunReport::new(
                problem.id(),
                alg.label(),
                run.policy,
                run.config,
                &run.trace,
                run.wall_time_s,
            )
        })
        .collect();
    if let Some(path) = &args.report {
        write_json(&reports, path)?;
    }
    Ok(CompareOutcome { reports, rows })
}
