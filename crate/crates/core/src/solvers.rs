//! The radial subgradient method and the two function-oriented Renegar
//! baselines, with per-iteration tracing.
//!
//! All three work on the radial reformulation `γ_z` of a canonical instance
//! and never project onto the domain: iterates are kept feasible by scaling
//! them along the ray through the origin.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::problem_model::{Point, ProblemInstance};
use crate::radial_geometry::{eval_gamma, gamma_subgradient, GammaResult, LineSearchConfig};

/// Absolute slack allowed in `f* ≤ f(xᵢ) ≤ zᵢ`.
pub const ORDERING_TOL: f64 = 1e-9;
/// Absolute slack allowed in the per-iteration descent inequality.
pub const MODIFIED_INEQUALITY_TOL: f64 = 1e-7;
/// `|γ_{zᵢ}(xᵢ) − 1|` may exceed the line-search tolerance by this factor.
pub const GAMMA_RESIDUAL_FACTOR: f64 = 10.0;

/// Quantities a step-size rule may depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepState {
    pub iter: usize,
    pub z: f64,
    pub subgrad_norm: f64,
}

type Schedule = Arc<dyn Fn(usize) -> f64 + Send + Sync>;
type Rule = Arc<dyn Fn(&StepState) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum StepPolicy {
    /// `αᵢ = −zᵢ·βᵢ` for a divergent, square-summable `βᵢ`.
    SquareSummable {
        beta: Schedule,
    },
    /// `αᵢ = ε / (2‖ζᵢ‖²)`
    EpsilonTarget {
        epsilon: f64,
    },
    /// `αᵢ = (zᵢ − f*)/(0 − f*) · 1/‖ζᵢ‖²`
    KnownOptimum {
        f_star: f64,
    },
    Custom {
        rule: Rule,
    },
}

impl StepPolicy {
    /// `βᵢ = β₀/(i + 1)`
    pub fn harmonic(beta0: f64) -> Self {
        StepPolicy::SquareSummable {
            beta: Arc::new(move |i| beta0 / (i as f64 + 1.0)),
        }
    }

    pub fn epsilon_target(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(StepPolicy::EpsilonTarget { epsilon })
    }

    pub fn known_optimum(f_star: f64) -> Result<Self> {
        if !(f_star < 0.0 && f_star.is_finite()) {
            return Err(Error::InvalidArgument(format!("f_star must be negative, got {f_star}")));
        }
        Ok(StepPolicy::KnownOptimum { f_star })
    }

    pub fn custom(rule: impl Fn(&StepState) -> f64 + Send + Sync + 'static) -> Self {
        StepPolicy::Custom { rule: Arc::new(rule) }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StepPolicy::SquareSummable { .. } => "sqsum",
            StepPolicy::EpsilonTarget { .. } => "eps-target",
            StepPolicy::KnownOptimum { .. } => "known-opt",
            StepPolicy::Custom { .. } => "custom",
        }
    }
}

impl fmt::Debug for StepPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepPolicy::SquareSummable { .. } => f.write_str("SquareSummable"),
            StepPolicy::EpsilonTarget { epsilon } => write!(f, "EpsilonTarget({epsilon})"),
            StepPolicy::KnownOptimum { f_star } => write!(f, "KnownOptimum({f_star})"),
            StepPolicy::Custom { .. } => f.write_str("Custom"),
        }
    }
}

/// Step length for the current iterate. A zero subgradient is reported as
/// [`Error::Precondition`]; callers treat it as stationarity.
pub fn step_size(policy: &StepPolicy, state: &StepState) -> Result<f64> {
    if state.subgrad_norm.is_nan() || state.subgrad_norm <= 0.0 {
        return Err(Error::Precondition("zero subgradient: iterate is stationary".into()));
    }
    if state.z.is_nan() || state.z >= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "level must be negative, got {}",
            state.z
        )));
    }
    let g2 = state.subgrad_norm * state.subgrad_norm;
    let alpha = match policy {
        StepPolicy::SquareSummable { beta } => -state.z * beta(state.iter),
        StepPolicy::EpsilonTarget { epsilon } => epsilon / (2.0 * g2),
        StepPolicy::KnownOptimum { f_star } => (state.z - f_star) / (0.0 - f_star) / g2,
        StepPolicy::Custom { rule } => rule(state),
    };
    Ok(alpha)
}

/// `(f(x) − f_ref)/(0 − f_ref)`
pub fn relative_accuracy(f_x: f64, f_ref: f64) -> f64 {
    (f_x - f_ref) / (0.0 - f_ref)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Stop once the relative accuracy drops to this (requires a known `f*`).
    pub target_epsilon: Option<f64>,
    pub line_search: LineSearchConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 1000,
            target_epsilon: None,
            line_search: LineSearchConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateRecord {
    pub iter: usize,
    pub x: Point,
    pub z: f64,
    /// Objective at the reported point: `xᵢ` for the radial method,
    /// `xᵢ/γ_{zᵢ}(xᵢ)` for the Renegar baselines.
    pub f_x: f64,
    pub alpha: Option<f64>,
    pub subgrad_norm: Option<f64>,
    /// `|γ_{zᵢ}(xᵢ) − 1|`
    pub gamma_residual: f64,
    pub rel_accuracy: Option<f64>,
    pub lemma34_slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    MaxIters,
    TargetReached,
    /// `γ_{zᵢ}(ray) = 0`: the objective decreases without bound along `ray`.
    UnboundedDetected {
        ray: Point,
    },
    NumericalStall {
        reason: String,
    },
}

impl RunStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::MaxIters => "MaxIters",
            RunStatus::TargetReached => "TargetReached",
            RunStatus::UnboundedDetected { .. } => "UnboundedDetected",
            RunStatus::NumericalStall { .. } => "NumericalStall",
        }
    }
}

/// Counts of online invariant checks that failed during a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InvariantViolations {
    pub gamma_residual: usize,
    pub ordering: usize,
    pub modified_inequality: usize,
}

impl InvariantViolations {
    pub fn total(&self) -> usize {
        self.gamma_residual + self.ordering + self.modified_inequality
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub records: Vec<IterateRecord>,
    pub status: RunStatus,
    pub best_value: f64,
    pub best_point: Point,
    pub violations: InvariantViolations,
}

impl RunTrace {
    /// First iteration whose relative accuracy is at most `epsilon`.
    pub fn achieved_iteration(&self, epsilon: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.rel_accuracy.is_some_and(|a| a <= epsilon))
            .map(|r| r.iter)
    }

    pub fn best_relative_accuracy(&self) -> Option<f64> {
        self.records
            .iter()
            .filter_map(|r| r.rel_accuracy)
            .fold(None, |acc: Option<f64>, a| Some(acc.map_or(a, |b| b.min(a))))
    }

    /// Iterations taken, i.e. the index of the last record.
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.iter)
    }
}

/// Accumulates records and the best point seen.
struct TraceBuilder {
    records: Vec<IterateRecord>,
    best_value: f64,
    best_point: Point,
    violations: InvariantViolations,
}

impl TraceBuilder {
    fn new(dim: usize) -> Self {
        TraceBuilder {
            records: Vec::new(),
            best_value: f64::INFINITY,
            best_point: Point::origin(dim),
            violations: InvariantViolations::default(),
        }
    }

    fn push(&mut self, record: IterateRecord, at: &Point) {
        if record.f_x < self.best_value {
            self.best_value = record.f_x;
            self.best_point = at.clone();
        }
        self.records.push(record);
    }

    fn last_mut(&mut self) -> &mut IterateRecord {
        self.records.last_mut().expect("trace has at least one record")
    }

    fn finish(self, status: RunStatus) -> RunTrace {
        RunTrace {
            records: self.records,
            status,
            best_value: self.best_value,
            best_point: self.best_point,
            violations: self.violations,
        }
    }
}

fn finite_value(problem: &ProblemInstance, x: &[f64], iter: usize) -> Result<f64> {
    problem
        .evaluate(x)?
        .finite()
        .ok_or_else(|| Error::Oracle(format!("iterate {iter} left the domain of the objective")))
}

fn with_iter(e: Error, iter: usize) -> Error {
    match e {
        Error::Oracle(msg) => Error::Oracle(format!("iteration {iter}: {msg}")),
        other => other,
    }
}

/// Line-search failures that end a run with [`RunStatus::NumericalStall`]
/// rather than an error.
fn stall_reason(e: &Error) -> Option<String> {
    match e {
        Error::BracketStall { .. } | Error::DegenerateNormal { .. } | Error::BracketExhausted { .. } => {
            Some(e.to_string())
        }
        _ => None,
    }
}

fn validate_config(cfg: &SolverConfig) -> Result<()> {
    cfg.line_search.validate()?;
    if let Some(eps) = cfg.target_epsilon {
        if eps.is_nan() || eps <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "target epsilon must be positive, got {eps}"
            )));
        }
    }
    Ok(())
}

/// Squared distances in the per-iteration descent inequality relating
/// iterates `k` and `k + 1` through the reference point `y`; returns
/// right-hand side minus left-hand side.
#[allow(clippy::too_many_arguments)]
fn modified_inequality_slack(
    y: &Point,
    f_y: f64,
    x_k: &Point,
    z_k: f64,
    x_next: &Point,
    z_next: f64,
    alpha: f64,
    subgrad_norm: f64,
) -> f64 {
    let lhs = x_next.scaled(f_y / z_next).sub(y).norm_sq();
    let ratio = f_y / z_k;
    let rhs = x_k.scaled(ratio).sub(y).norm_sq() - 2.0 * alpha * ratio * (z_k - f_y) / (0.0 - z_k)
        + alpha * alpha * ratio * ratio * subgrad_norm * subgrad_norm;
    rhs - lhs
}

/// The radial subgradient method.
///
/// Starting from `x₀ = 0, z₀ = f(0)`, each iteration takes a subgradient
/// step on `γ_{zᵢ}` and rescales `(x̃ᵢ₊₁, zᵢ)` by `1/γ_{zᵢ}(x̃ᵢ₊₁)`, which puts
/// the new iterate back on the boundary of the epigraph.
pub fn radial_subgradient_run(problem: &ProblemInstance, policy: &StepPolicy, cfg: &SolverConfig) -> Result<RunTrace> {
    validate_config(cfg)?;
    let ls = cfg.line_search;
    let meta = problem.metadata();
    let f_star = meta.f_star.or(match policy {
        StepPolicy::KnownOptimum { f_star } => Some(*f_star),
        _ => None,
    });
    let reference = match (&meta.optimum, meta.f_star) {
        (Some(y), Some(fy)) if fy < 0.0 => Some((y.clone(), fy)),
        _ => None,
    };
    let residual_cap = GAMMA_RESIDUAL_FACTOR * ls.gamma_tol;

    let mut trace = TraceBuilder::new(problem.dimension());
    let mut x = problem.origin();
    let mut z = problem.value_at_origin();
    let mut step_guess = 1.0;

    for iter in 0.. {
        let f_x = finite_value(problem, &x, iter)?;
        let gamma = match eval_gamma(problem, z, &x, &ls.with_initial_guess(1.0)) {
            Ok(GammaResult::Positive { gamma, .. }) => gamma,
            Ok(GammaResult::ZeroDetected { .. }) => {
                return Err(Error::Oracle(format!(
                    "iteration {iter}: iterate lost its radial scale"
                )))
            }
            Err(e) => match stall_reason(&e) {
                Some(reason) => return Ok(trace.finish(RunStatus::NumericalStall { reason })),
                None => return Err(with_iter(e, iter)),
            },
        };
        let gamma_residual = (gamma - 1.0).abs();
        if gamma_residual > residual_cap {
            trace.violations.gamma_residual += 1;
        }
        let below_level = f_x <= z + ORDERING_TOL && z < 0.0;
        let above_opt = f_star.is_none_or(|fs| fs <= f_x + ORDERING_TOL);
        if !(below_level && above_opt) {
            trace.violations.ordering += 1;
        }
        let rel_accuracy = f_star.map(|fs| relative_accuracy(f_x, fs));
        trace.push(
            IterateRecord {
                iter,
                x: x.clone(),
                z,
                f_x,
                alpha: None,
                subgrad_norm: None,
                gamma_residual,
                rel_accuracy,
                lemma34_slack: None,
            },
            &x,
        );

        if let (Some(eps), Some(acc)) = (cfg.target_epsilon, rel_accuracy) {
            if acc <= eps {
                return Ok(trace.finish(RunStatus::TargetReached));
            }
        }
        if iter >= cfg.max_iters {
            return Ok(trace.finish(RunStatus::MaxIters));
        }
        if let StepPolicy::KnownOptimum { f_star } = policy {
            // A gap below the line-search resolution counts as reaching f*.
            if relative_accuracy(z, *f_star) <= ls.gamma_tol {
                return Ok(trace.finish(RunStatus::TargetReached));
            }
        }

        let zeta = match gamma_subgradient(problem, z, &x, gamma) {
            Ok(g) => g,
            Err(e) => match stall_reason(&e) {
                Some(reason) => return Ok(trace.finish(RunStatus::NumericalStall { reason })),
                None => return Err(with_iter(e, iter)),
            },
        };
        let subgrad_norm = zeta.norm();
        if subgrad_norm == 0.0 {
            return Ok(trace.finish(RunStatus::TargetReached));
        }
        let alpha = step_size(policy, &StepState { iter, z, subgrad_norm })?;
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidStep(alpha));
        }
        {
            let rec = trace.last_mut();
            rec.alpha = Some(alpha);
            rec.subgrad_norm = Some(subgrad_norm);
        }

        let x_tilde = x.add_scaled(-alpha, &zeta);
        if !x_tilde.is_finite() {
            return Ok(trace.finish(RunStatus::NumericalStall {
                reason: "subgradient step overflowed".into(),
            }));
        }
        let scale = match eval_gamma(problem, z, &x_tilde, &ls.with_initial_guess(step_guess)) {
            Ok(GammaResult::Positive { gamma, .. }) => gamma,
            Ok(GammaResult::ZeroDetected { .. }) => {
                return Ok(trace.finish(RunStatus::UnboundedDetected { ray: x_tilde }))
            }
            Err(e) => match stall_reason(&e) {
                Some(reason) => return Ok(trace.finish(RunStatus::NumericalStall { reason })),
                None => return Err(with_iter(e, iter)),
            },
        };
        step_guess = scale.max(2.0 * ls.gamma_min);
        let x_next = x_tilde.divided(scale);
        let z_next = z / scale;

        if let Some((y, f_y)) = &reference {
            let slack = modified_inequality_slack(y, *f_y, &x, z, &x_next, z_next, alpha, subgrad_norm);
            if slack < -MODIFIED_INEQUALITY_TOL {
                trace.violations.modified_inequality += 1;
            }
            trace.last_mut().lemma34_slack = Some(slack);
        }
        x = x_next;
        z = z_next;
    }
    unreachable!("the iteration loop only exits by returning")
}

/// Radial threshold below which the A baseline rescales its iterate.
const RENEGAR_A_THRESHOLD: f64 = 0.75;

/// Function-oriented Renegar algorithm A: steps of `ε/(2‖ζ‖²)` at a fixed
/// level, with a radial update only once `γ_z(x) ≤ 3/4`.
///
/// Accuracy is reported at the scaled point `xᵢ/γ_{zᵢ}(xᵢ)`.
pub fn renegar_a_run(problem: &ProblemInstance, epsilon: f64, cfg: &SolverConfig) -> Result<RunTrace> {
    validate_config(cfg)?;
    let policy = StepPolicy::epsilon_target(epsilon)?;
    let ls = cfg.line_search;
    let f_star = problem.metadata().f_star;

    let mut trace = TraceBuilder::new(problem.dimension());
    let mut x = problem.origin();
    let mut z = problem.value_at_origin();
    let mut gamma = 1.0;

    for iter in 0.. {
        let scaled = x.divided(gamma);
        let f_x = finite_value(problem, &scaled, iter)?;
        let rel_accuracy = f_star.map(|fs| relative_accuracy(f_x, fs));
        trace.push(
            IterateRecord {
                iter,
                x: x.clone(),
                z,
                f_x,
                alpha: None,
                subgrad_norm: None,
                gamma_residual: (gamma - 1.0).abs(),
                rel_accuracy,
                lemma34_slack: None,
            },
            &scaled,
        );
        if let (Some(eps), Some(acc)) = (cfg.target_epsilon, rel_accuracy) {
            if acc <= eps {
                return Ok(trace.finish(RunStatus::TargetReached));
            }
        }
        if iter >= cfg.max_iters {
            return Ok(trace.finish(RunStatus::MaxIters));
        }

        let zeta = match gamma_subgradient(problem, z, &x, gamma) {
            Ok(g) => g,
            Err(e) => match stall_reason(&e) {
                Some(reason) => return Ok(trace.finish(RunStatus::NumericalStall { reason })),
                None => return Err(with_iter(e, iter)),
            },
        };
        let subgrad_norm = zeta.norm();
        if subgrad_norm == 0.0 {
            return Ok(trace.finish(RunStatus::TargetReached));
        }
        let alpha = step_size(&policy, &StepState { iter, z, subgrad_norm })?;
        {
            let rec = trace.last_mut();
            rec.alpha = Some(alpha);
            rec.subgrad_norm = Some(subgrad_norm);
        }
        let next = x.add_scaled(-alpha, &zeta);
        if !next.is_finite() {
            return Ok(trace.finish(RunStatus::NumericalStall {
                reason: "subgradient step overflowed".into(),
            }));
        }
        let next_gamma = match eval_gamma(problem, z, &next, &ls.with_initial_guess(gamma.max(2.0 * ls.gamma_min))) {
            Ok(GammaResult::Positive { gamma, .. }) => gamma,
            Ok(GammaResult::ZeroDetected { .. }) => return Ok(trace.finish(RunStatus::UnboundedDetected { ray: next })),
            Err(e) => match stall_reason(&e) {
                Some(reason) => return Ok(trace.finish(RunStatus::NumericalStall { reason })),
                None => return Err(with_iter(e, iter)),
            },
        };
        if next_gamma <= RENEGAR_A_THRESHOLD {
            x = next.divided(next_gamma);
            z /= next_gamma;
            gamma = match eval_gamma(problem, z, &x, &ls.with_initial_guess(1.0)) {
                Ok(GammaResult::Positive { gamma, .. }) => gamma,
                Ok(GammaResult::ZeroDetected { .. }) => {
                    return Ok(trace.finish(RunStatus::UnboundedDetected { ray: x }))
                }
                Err(e) => match stall_reason(&e) {
                    Some(reason) => return Ok(trace.finish(RunStatus::NumericalStall { reason })),
                    None => return Err(with_iter(e, iter)),
                },
            };
        } else {
            x = next;
            gamma = next_gamma;
        }
    }
    unreachable!("the iteration loop only exits by returning")
}

/// Function-oriented Renegar algorithm B: Polyak-type steps
/// `(γ_{f*}(x) − 1)/‖ζ‖²` at the fixed level `f*`, never rescaling.
pub fn renegar_b_run(problem: &ProblemInstance, f_star: f64, cfg: &SolverConfig) -> Result<RunTrace> {
    validate_config(cfg)?;
    if !(f_star < 0.0 && f_star.is_finite()) {
        return Err(Error::InvalidArgument(format!("f_star must be negative, got {f_star}")));
    }
    let ls = cfg.line_search;
    let z = f_star;

    let mut trace = TraceBuilder::new(problem.dimension());
    let mut x = problem.origin();
    let mut guess = (f_star / problem.value_at_origin()).max(1.0);

    for iter in 0.. {
        let gamma = match eval_gamma(problem, z, &x, &ls.with_initial_guess(guess)) {
            Ok(GammaResult::Positive { gamma, .. }) => gamma,
            Ok(GammaResult::ZeroDetected { .. }) => return Ok(trace.finish(RunStatus::UnboundedDetected { ray: x })),
            Err(e) => match stall_reason(&e) {
                Some(reason) => return Ok(trace.finish(RunStatus::NumericalStall { reason })),
                None => return Err(with_iter(e, iter)),
            },
        };
        guess = gamma;
        let scaled = x.divided(gamma);
        let f_x = finite_value(problem, &scaled, iter)?;
        let rel_accuracy = Some(relative_accuracy(f_x, f_star));
        trace.push(
            IterateRecord {
                iter,
                x: x.clone(),
                z,
                f_x,
                alpha: None,
                subgrad_norm: None,
                gamma_residual: (gamma - 1.0).abs(),
                rel_accuracy,
                lemma34_slack: None,
            },
            &scaled,
        );
        if gamma <= 1.0 {
            return Ok(trace.finish(RunStatus::TargetReached));
        }
        if let (Some(eps), Some(acc)) = (cfg.target_epsilon, rel_accuracy) {
            if acc <= eps {
                return Ok(trace.finish(RunStatus::TargetReached));
            }
        }
        if iter >= cfg.max_iters {
            return Ok(trace.finish(RunStatus::MaxIters));
        }
        let zeta = match gamma_subgradient(problem, z, &x, gamma) {
            Ok(g) => g,
            Err(e) => match stall_reason(&e) {
                Some(reason) => return Ok(trace.finish(RunStatus::NumericalStall { reason })),
                None => return Err(with_iter(e, iter)),
            },
        };
        let subgrad_norm = zeta.norm();
        if subgrad_norm == 0.0 {
            return Ok(trace.finish(RunStatus::TargetReached));
        }
        let alpha = (gamma - 1.0) / (subgrad_norm * subgrad_norm);
        {
            let rec = trace.last_mut();
            rec.alpha = Some(alpha);
            rec.subgrad_norm = Some(subgrad_norm);
        }
        x = x.add_scaled(-alpha, &zeta);
        if !x.is_finite() {
            return Ok(trace.finish(RunStatus::NumericalStall {
                reason: "subgradient step overflowed".into(),
            }));
        }
    }
    unreachable!("the iteration loop only exits by returning")
}
