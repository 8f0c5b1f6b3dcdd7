use std::path::Path;

use anyhow::{Context, Result};
use radial_core::{InvariantViolations, RunStatus, RunTrace};
use serde::{Deserialize, Serialize};

/// The solver settings a run actually used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub max_iters: usize,
    pub epsilon: Option<f64>,
    pub beta0: Option<f64>,
    pub target_epsilon: Option<f64>,
    pub gamma_tol: f64,
    pub gamma_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationCounts {
    pub gamma_residual: usize,
    pub ordering: usize,
    pub modified_inequality: usize,
}

impl From<InvariantViolations> for ViolationCounts {
    fn from(v: InvariantViolations) -> Self {
        ViolationCounts {
            gamma_residual: v.gamma_residual,
            ordering: v.ordering,
            modified_inequality: v.modified_inequality,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub problem_id: String,
    pub algorithm: String,
    pub policy: Option<String>,
    pub config: ConfigEcho,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status_detail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unbounded_ray: Option<Vec<f64>>,
    pub best_rel_accuracy: Option<f64>,
    pub achieved_iteration: Option<usize>,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub violations: ViolationCounts,
}

impl RunReport {
    pub fn new(
        problem_id: &str,
        algorithm: &str,
        policy: Option<&str>,
        config: ConfigEcho,
        trace: &RunTrace,
        wall_time_s: f64,
    ) -> Self {
        let (status_detail, unbounded_ray) = match &trace.status {
            RunStatus::NumericalStall { reason } => (Some(reason.clone()), None),
            RunStatus::UnboundedDetected { ray } => (None, Some(ray.as_slice().to_vec())),
            _ => (None, None),
        };
        let achieved_iteration = config.epsilon.and_then(|eps| trace.achieved_iteration(eps));
        RunReport {
            problem_id: problem_id.to_string(),
            algorithm: algorithm.to_string(),
            policy: policy.map(str::to_string),
            config,
            status: trace.status.label().to_string(),
            status_detail,
            unbounded_ray,
            best_rel_accuracy: trace.best_relative_accuracy(),
            achieved_iteration,
            iterations: trace.iterations(),
            wall_time_s,
            violations: trace.violations.into(),
        }
    }
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("cannot write report {}", path.display()))
}
