use serde::{Deserialize, Serialize};

/// Which iteration guarantee a bound check verifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    EpsTarget,
    KnownOptimum,
    RenegarA,
    RenegarB,
}

impl Theorem {
    pub fn label(self) -> &'static str {
        match self {
            Theorem::EpsTarget => "eps_target",
            Theorem::KnownOptimum => "known_optimum",
            Theorem::RenegarA => "renegar_a",
            Theorem::RenegarB => "renegar_b",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckReport {
    pub theorem: Theorem,
    pub epsilon: f64,
    pub bound_iterations: usize,
    pub achieved_iteration: Option<usize>,
    pub passed: bool,
}

impl BoundCheckReport {
    pub fn new(theorem: Theorem, epsilon: f64, bound_iterations: usize, achieved_iteration: Option<usize>) -> Self {
        BoundCheckReport {
            theorem,
            epsilon,
            bound_iterations,
            achieved_iteration,
            passed: achieved_iteration.is_some_and(|i| i <= bound_iterations),
        }
    }
}

/// Ceiling that treats values within rounding noise of an integer as that
/// integer, so `1/0.1²` gives 100 and not 101.
pub fn ceil_snapped(v: f64) -> usize {
    let nearest = v.round();
    let c = if (v - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
        nearest
    } else {
        v.ceil()
    };
    c.max(0.0) as usize
}

/// `⌈(4/3)·(dist/R)²/ε²⌉`
pub fn eps_target_bound(dist: f64, r: f64, epsilon: f64) -> usize {
    ceil_snapped(4.0 / 3.0 * (dist / r).powi(2) / (epsilon * epsilon))
}

/// `⌈(dist/R)²/ε²⌉`
pub fn known_optimum_bound(dist: f64, r: f64, epsilon: f64) -> usize {
    ceil_snapped((dist / r).powi(2) / (epsilon * epsilon))
}

/// `⌈8(D/R)²(1/ε² + (1/ε)·log_{4/3}(1 + D/R))⌉`
pub fn renegar_a_bound(d: f64, r: f64, epsilon: f64) -> usize {
    let ratio = d / r;
    let log = (1.0 + ratio).ln() / (4.0f64 / 3.0).ln();
    ceil_snapped(8.0 * ratio * ratio * (1.0 / (epsilon * epsilon) + log / epsilon))
}

/// `⌈4(D/R)²((4/3)q² + 4q + log₂q + log₂(D/R) + 1)⌉` with `q = (1 − ε)/ε`,
/// valid for `0 < ε < 1`.
pub fn renegar_b_bound(d: f64, r: f64, epsilon: f64) -> usize {
    let ratio = d / r;
    let q = (1.0 - epsilon) / epsilon;
    ceil_snapped(4.0 * ratio * ratio * (4.0 / 3.0 * q * q + 4.0 * q + q.log2() + ratio.log2() + 1.0))
}
