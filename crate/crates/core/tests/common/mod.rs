#![allow(dead_code)]

use radial_core::{
    make_ball_sqrt, make_linear_program, make_piecewise_max, BallSqrtData, LinearProgramData, Piece, PiecewiseMaxData,
    Point, ProblemInstance, ProblemMetadata,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ball() -> ProblemInstance {
    make_ball_sqrt(BallSqrtData { center: vec![0.5, 0.0] }).unwrap()
}

pub fn ball_3d() -> ProblemInstance {
    make_ball_sqrt(BallSqrtData {
        center: vec![0.2, -0.3, 0.1],
    })
    .unwrap()
}

pub fn lp_1d() -> ProblemInstance {
    make_linear_program(LinearProgramData {
        a: vec![vec![1.0]],
        b: vec![2.0],
        c: vec![-1.0],
        h: 1.0,
    })
    .unwrap()
}

pub fn lp_2d_data() -> LinearProgramData {
    LinearProgramData {
        a: vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]],
        b: vec![1.0, 2.0, 3.0],
        c: vec![-1.0, -1.0],
        h: 1.0,
    }
}

/// Optimal vertex (1, 2); the nearest face of `{f ≤ 0}` is `x + y = −1`.
pub fn lp_2d() -> ProblemInstance {
    make_linear_program(lp_2d_data())
        .unwrap()
        .with_metadata(ProblemMetadata {
            f_star: Some(-4.0),
            optimum: Some(Point::new(vec![1.0, 2.0]).unwrap()),
            dist_to_opt: Some(5f64.sqrt()),
            radius_r: Some(std::f64::consts::FRAC_1_SQRT_2),
            diameter_d: None,
        })
        .unwrap()
}

pub fn unbounded_lp() -> ProblemInstance {
    make_linear_program(LinearProgramData {
        a: vec![],
        b: vec![],
        c: vec![-1.0],
        h: 1.0,
    })
    .unwrap()
}

pub fn pw_1d() -> ProblemInstance {
    make_piecewise_max(PiecewiseMaxData {
        pieces: vec![Piece { a: vec![2.0], b: -1.0 }, Piece { a: vec![-1.0], b: -2.0 }],
    })
    .unwrap()
}

/// `‖x − (0.2, 0)‖_∞ − 1` written as four pieces.
pub fn pw_2d() -> ProblemInstance {
    make_piecewise_max(PiecewiseMaxData {
        pieces: vec![
            Piece {
                a: vec![1.0, 0.0],
                b: -1.2,
            },
            Piece {
                a: vec![-1.0, 0.0],
                b: -0.8,
            },
            Piece {
                a: vec![0.0, 1.0],
                b: -1.0,
            },
            Piece {
                a: vec![0.0, -1.0],
                b: -1.0,
            },
        ],
    })
    .unwrap()
}

/// Every bounded test instance.
pub fn bounded_instances() -> Vec<ProblemInstance> {
    vec![ball(), ball_3d(), lp_1d(), lp_2d(), pw_1d(), pw_2d()]
}

pub fn sample_box(rng: &mut ChaCha8Rng, dim: usize, half: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-half..half)).collect()
}

/// Rejection sample of a point where `f` is finite.
pub fn sample_domain(rng: &mut ChaCha8Rng, p: &ProblemInstance, half: f64) -> Vec<f64> {
    loop {
        let x = sample_box(rng, p.dimension(), half);
        if p.evaluate(&x).unwrap().is_finite() {
            return x;
        }
    }
}

pub fn value(p: &ProblemInstance, x: &[f64]) -> f64 {
    p.evaluate(x).unwrap().to_f64()
}

pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

pub fn midpoint(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect()
}
