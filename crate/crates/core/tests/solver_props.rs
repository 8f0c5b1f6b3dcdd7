mod common;

use common::*;
use proptest::prelude::*;
use radial_core::{
    radial_subgradient_run, renegar_a_run, renegar_b_run, step_size, ProblemInstance, RunStatus, RunTrace,
    SolverConfig, StepPolicy, StepState,
};
use std::sync::Arc;

fn policies(p: &ProblemInstance) -> Vec<StepPolicy> {
    vec![
        StepPolicy::harmonic(1.0),
        StepPolicy::epsilon_target(0.05).unwrap(),
        StepPolicy::known_optimum(p.metadata().f_star.unwrap()).unwrap(),
    ]
}

fn cfg(max_iters: usize) -> SolverConfig {
    SolverConfig {
        max_iters,
        ..Default::default()
    }
}

fn assert_clean(p: &ProblemInstance, trace: &RunTrace, what: &str) {
    let f_star = p.metadata().f_star.unwrap();
    let cap = 10.0 * cfg(0).line_search.gamma_tol;
    assert_eq!(trace.violations.total(), 0, "{} {what}: {:?}", p.id(), trace.violations);
    assert!(
        !matches!(trace.status, RunStatus::NumericalStall { .. }),
        "{} {what}: {:?}",
        p.id(),
        trace.status
    );
    for r in &trace.records {
        assert!(r.z < 0.0);
        assert!(r.f_x <= r.z + 1e-9, "{} {what}: f = {} > z = {}", p.id(), r.f_x, r.z);
        assert!(r.f_x >= f_star - 1e-9);
        assert!(r.gamma_residual <= cap);
        assert!(r.alpha.is_none_or(|a| a > 0.0));
        assert!(
            r.lemma34_slack.is_none_or(|s| s >= -1e-7),
            "{} {what}: slack {:?}",
            p.id(),
            r.lemma34_slack
        );
    }
}

#[test]
fn radial_runs_keep_their_invariants() {
    for p in bounded_instances() {
        for policy in policies(&p) {
            let trace = radial_subgradient_run(&p, &policy, &cfg(2000)).unwrap();
            assert_clean(&p, &trace, policy.name());
            assert!(
                trace.best_relative_accuracy().unwrap() <= 0.05,
                "{} {}",
                p.id(),
                policy.name()
            );
        }
    }
}

#[test]
fn best_value_never_increases() {
    for p in bounded_instances() {
        let trace = radial_subgradient_run(&p, &StepPolicy::harmonic(1.0), &cfg(3000)).unwrap();
        let mut best = f64::INFINITY;
        for r in &trace.records {
            best = best.min(r.f_x);
        }
        assert_eq!(best, trace.best_value);
        assert_eq!(p.evaluate(&trace.best_point).unwrap().to_f64(), trace.best_value);
    }
}

#[test]
fn baselines_reach_moderate_accuracy() {
    for p in bounded_instances() {
        let f_star = p.metadata().f_star.unwrap();
        let a = renegar_a_run(&p, 0.1, &cfg(5000)).unwrap();
        assert!(a.achieved_iteration(0.1).is_some(), "{}: renegar A", p.id());
        let b = renegar_b_run(&p, f_star, &cfg(5000)).unwrap();
        assert!(b.achieved_iteration(0.1).is_some(), "{}: renegar B", p.id());
        for r in a.records.iter().chain(&b.records) {
            assert!(r.f_x >= f_star - 1e-9 && r.z < 0.0);
        }
    }
}

#[test]
fn unbounded_linear_objective_is_detected_by_harmonic_steps() {
    let p = unbounded_lp();
    let trace = radial_subgradient_run(&p, &StepPolicy::harmonic(1.0), &cfg(100)).unwrap();
    match &trace.status {
        RunStatus::UnboundedDetected { ray } => assert!(ray[0] > 0.0),
        other => panic!("expected unboundedness, got {other:?}"),
    }
    assert!(trace.iterations() <= 10);
}

#[test]
fn runs_are_deterministic_across_threads() {
    let p = Arc::new(ball());
    let reference = radial_subgradient_run(&p, &StepPolicy::harmonic(1.0), &cfg(500)).unwrap();
    let traces: Vec<RunTrace> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let p = Arc::clone(&p);
                s.spawn(move || radial_subgradient_run(&p, &StepPolicy::harmonic(1.0), &cfg(500)).unwrap())
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for t in traces {
        assert_eq!(t, reference);
    }
}

#[test]
fn custom_rule_sees_the_iteration_state() {
    let p = lp_1d();
    let policy = StepPolicy::custom(|s: &StepState| 0.5 / (s.iter as f64 + 1.0) / s.subgrad_norm);
    let trace = radial_subgradient_run(&p, &policy, &cfg(50)).unwrap();
    for r in trace.records.iter().filter(|r| r.alpha.is_some()) {
        let expected = 0.5 / (r.iter as f64 + 1.0) / r.subgrad_norm.unwrap();
        assert!((r.alpha.unwrap() - expected).abs() <= 1e-15 * expected);
    }
}

#[test]
fn target_epsilon_stops_early() {
    let p = ball();
    let c = SolverConfig {
        max_iters: 10_000,
        target_epsilon: Some(0.01),
        ..Default::default()
    };
    let trace = radial_subgradient_run(&p, &StepPolicy::epsilon_target(0.01).unwrap(), &c).unwrap();
    assert_eq!(trace.status, RunStatus::TargetReached);
    assert_eq!(Some(trace.iterations()), trace.achieved_iteration(0.01));
}

proptest! {
    #[test]
    fn step_sizes_are_positive(
        iter in 0usize..100_000,
        z in -10.0f64..-1e-3,
        norm in 1e-6f64..1e3,
        eps in 1e-4f64..1.0,
        beta0 in 1e-3f64..10.0,
    ) {
        let state = StepState { iter, z, subgrad_norm: norm };
        prop_assert!(step_size(&StepPolicy::harmonic(beta0), &state).unwrap() > 0.0);
        prop_assert!(step_size(&StepPolicy::epsilon_target(eps).unwrap(), &state).unwrap() > 0.0);
        let f_star = z * 1.5;
        prop_assert!(step_size(&StepPolicy::known_optimum(f_star).unwrap(), &state).unwrap() > 0.0);
    }

    #[test]
    fn harmonic_steps_scale_with_level(iter in 0usize..1000, z in -10.0f64..-1e-3, beta0 in 1e-3f64..10.0) {
        let state = StepState { iter, z, subgrad_norm: 1.0 };
        let a = step_size(&StepPolicy::harmonic(beta0), &state).unwrap();
        prop_assert!((a - (-z) * beta0 / (iter as f64 + 1.0)).abs() <= 1e-15 * a);
    }
}
