//! Perspective function, radial reformulation `γ_z` and its subgradients.
//!
//! `f^p(x, γ) = γ·f(x/γ)` is strictly decreasing in `γ` whenever `f(0) < 0`,
//! so `{γ > 0 : f^p(x, γ) ≤ z}` is an upper interval and `γ_z(x)` is its
//! left endpoint. [`eval_gamma`] brackets that endpoint geometrically and
//! then bisects.

use crate::error::{Error, Result};
use crate::problem_model::{ExtendedValue, Point, ProblemInstance};

/// Denominators of the subgradient formula below this are treated as degenerate.
pub const MIN_DENOMINATOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchConfig {
    /// Relative bracket width at which bisection stops.
    pub gamma_tol: f64,
    /// Feasible scales at or below this are reported as a zero of `γ_z`.
    pub gamma_min: f64,
    /// Cap on upward bracket doublings.
    pub max_expansions: u32,
    pub initial_guess: f64,
}

impl Default for LineSearchConfig {
    fn default() -> Self {
        LineSearchConfig {
            gamma_tol: 1e-10,
            gamma_min: 1e-12,
            max_expansions: 200,
            initial_guess: 1.0,
        }
    }
}

impl LineSearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_tol > 0.0 && self.gamma_tol < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "gamma_tol must lie in (0, 1), got {}",
                self.gamma_tol
            )));
        }
        if self.gamma_min.is_nan() || self.gamma_min <= 0.0 {
            return Err(Error::InvalidArgument("gamma_min must be positive".into()));
        }
        if !(self.initial_guess.is_finite() && self.initial_guess > self.gamma_min) {
            return Err(Error::InvalidArgument(format!(
                "initial_guess {} must be finite and exceed gamma_min {}",
                self.initial_guess, self.gamma_min
            )));
        }
        if self.max_expansions == 0 {
            return Err(Error::InvalidArgument("max_expansions must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_initial_guess(mut self, guess: f64) -> Self {
        self.initial_guess = guess;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaResult {
    /// `gamma` is feasible; `gamma·(1 − gamma_tol)` is not.
    Positive { gamma: f64, bracket_width: f64 },
    /// Every scale down to `witness_gamma ≤ gamma_min` is feasible: the
    /// objective is numerically unbounded along the ray through `x`.
    ZeroDetected { witness_gamma: f64 },
}

impl GammaResult {
    pub fn gamma(&self) -> Option<f64> {
        match *self {
            GammaResult::Positive { gamma, .. } => Some(gamma),
            GammaResult::ZeroDetected { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, GammaResult::ZeroDetected { .. })
    }
}

/// `γ·f(x/γ)`, `+∞` when `x/γ ∉ dom f`.
pub fn perspective_value(problem: &ProblemInstance, x: &[f64], gamma: f64) -> Result<ExtendedValue> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "perspective scale must be positive and finite, got {gamma}"
        )));
    }
    if x.len() != problem.dimension() {
        return Err(Error::DimensionMismatch {
            expected: problem.dimension(),
            got: x.len(),
        });
    }
    perspective(problem, x, gamma)
}

fn perspective(problem: &ProblemInstance, x: &[f64], gamma: f64) -> Result<ExtendedValue> {
    let scaled: Vec<f64> = x.iter().map(|c| c / gamma).collect();
    Ok(problem.value_unchecked(&scaled)?.scale(gamma))
}

/// `γ_z(x) = inf{γ > 0 : f^p(x, γ) ≤ z}` by bracketing and bisection.
///
/// The returned `gamma` is the upper end of the final bracket, so it is
/// always feasible.
pub fn eval_gamma(problem: &ProblemInstance, z: f64, x: &[f64], cfg: &LineSearchConfig) -> Result<GammaResult> {
    if !(z < 0.0 && z.is_finite()) {
        return Err(Error::InvalidArgument(format!("level z must be negative, got {z}")));
    }
    if x.len() != problem.dimension() {
        return Err(Error::DimensionMismatch {
            expected: problem.dimension(),
            got: x.len(),
        });
    }
    cfg.validate()?;
    let feasible = |g: f64| -> Result<bool> { Ok(perspective(problem, x, g)?.le(z)) };

    let mut lo;
    let mut hi;
    if feasible(cfg.initial_guess)? {
        hi = cfg.initial_guess;
        loop {
            if hi <= cfg.gamma_min {
                return Ok(GammaResult::ZeroDetected { witness_gamma: hi });
            }
            let next = 0.5 * hi;
            if feasible(next)? {
                hi = next;
            } else {
                lo = next;
                break;
            }
        }
    } else {
        lo = cfg.initial_guess;
        let mut expansions = 0;
        loop {
            if expansions == cfg.max_expansions {
                return Err(Error::BracketExhausted { expansions });
            }
            expansions += 1;
            let next = 2.0 * lo;
            if !next.is_finite() {
                return Err(Error::BracketExhausted { expansions });
            }
            if feasible(next)? {
                hi = next;
                break;
            }
            lo = next;
        }
    }

    while hi - lo > cfg.gamma_tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::BracketStall { lo, hi });
        }
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if hi < cfg.gamma_min {
        return Ok(GammaResult::ZeroDetected { witness_gamma: hi });
    }
    Ok(GammaResult::Positive {
        gamma: hi,
        bracket_width: hi - lo,
    })
}

/// One subgradient of `γ_z` at `x`, given `gamma = γ_z(x) > 0`.
///
/// Takes a normal `(ζ, δ)` of `epi f` at `(x/γ, z/γ)` and returns
/// `γ / (⟨ζ, x⟩ + δz) · ζ`.
pub fn gamma_subgradient(problem: &ProblemInstance, z: f64, x: &[f64], gamma: f64) -> Result<Point> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
    }
    if x.len() != problem.dimension() {
        return Err(Error::DimensionMismatch {
            expected: problem.dimension(),
            got: x.len(),
        });
    }
    let boundary: Vec<f64> = x.iter().map(|c| c / gamma).collect();
    let normal = problem.support_normal(&boundary)?;
    let zeta = normal.zeta();
    let denominator = crate::problem_model::dot(zeta, x) + normal.delta() * z;
    if denominator.is_nan() || denominator < MIN_DENOMINATOR {
        return Err(Error::DegenerateNormal { denominator });
    }
    Ok(zeta.scaled(gamma / denominator))
}

/// Smallest `γ` on an evenly spaced grid over `[lo, hi]` with `f^p(x, γ) ≤ z`,
/// found by a linear scan. `None` when no grid point is feasible.
///
/// Brute-force reference for testing [`eval_gamma`].
pub fn gamma_grid_oracle(
    problem: &ProblemInstance,
    z: f64,
    x: &[f64],
    lo: f64,
    hi: f64,
    steps: usize,
) -> Result<Option<f64>> {
    if !(lo > 0.0 && lo < hi) || steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid needs 0 < lo < hi and at least 2 steps, got [{lo}, {hi}] x {steps}"
        )));
    }
    let step = (hi - lo) / (steps - 1) as f64;
    for k in 0..steps {
        let g = lo + step * k as f64;
        if perspective_value(problem, x, g)?.le(z) {
            return Ok(Some(g));
        }
    }
    Ok(None)
}
