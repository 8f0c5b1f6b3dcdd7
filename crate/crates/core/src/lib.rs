//! Projection-free minimization of non-smooth, non-Lipschitz convex functions
//! through their radial reformulation.
//!
//! Given a convex `f` with a strictly feasible point at the origin and
//! `f(0) < 0`, the radial reformulation of level `z < 0`,
//!
//! ```text
//! γ_z(x) = inf { γ > 0 : γ·f(x/γ) ≤ z },
//! ```
//!
//! is convex and `1/R`-Lipschitz even when `f` is neither. The
//! [`solvers::radial_subgradient_run`] method runs subgradient steps on
//! `γ_z` and keeps iterates feasible by radial rescaling instead of
//! orthogonal projection.

pub mod error;
pub mod problem_library;
pub mod problem_model;
pub mod radial_geometry;
pub mod solvers;

pub use error::{Error, Result};
pub use problem_library::{
    load_problem_file, lp_gamma_closed_form, make_ball_sqrt, make_linear_program, make_piecewise_max,
    write_problem_file, BallSqrtData, LinearProgramData, Piece, PiecewiseMaxData, ProblemFile,
};
pub use problem_model::{
    canonicalize, EpigraphNormal, ExtendedValue, Objective, Point, ProblemInstance, ProblemMetadata,
};
pub use radial_geometry::{
    eval_gamma, gamma_grid_oracle, gamma_subgradient, perspective_value, GammaResult, LineSearchConfig,
};
pub use solvers::{
    radial_subgradient_run, relative_accuracy, renegar_a_run, renegar_b_run, step_size, InvariantViolations,
    IterateRecord, RunStatus, RunTrace, SolverConfig, StepPolicy, StepState,
};
