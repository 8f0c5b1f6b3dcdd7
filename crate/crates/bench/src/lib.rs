//! Run, trace and bound-check harness for the radial subgradient method and
//! the two Renegar baselines.

pub mod bounds;
pub mod commands;
pub mod report;
pub mod trace_csv;

pub use bounds::{
    ceil_snapped, eps_target_bound, known_optimum_bound, renegar_a_bound, renegar_b_bound, BoundCheckReport, Theorem,
};
pub use commands::{
    compare, execute, solve, theorem_for, verify_bounds, verify_bounds_on, Algorithm, CompareOutcome, Execution,
    PolicyKind, RunArgs, SolveOutcome, VerifyOutcome,
};
pub use report::{ConfigEcho, RunReport, ViolationCounts};
pub use trace_csv::{format_real, trace_header, write_trace, write_trace_csv};
