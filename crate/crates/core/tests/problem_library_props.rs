mod common;

use common::*;
use radial_core::{
    load_problem_file, make_ball_sqrt, write_problem_file, BallSqrtData, Error, ProblemFile, ProblemInstance,
};
use rand::Rng;
use std::f64::consts::TAU;

fn sphere_point(rng: &mut rand_chacha::ChaCha8Rng, dim: usize, radius: f64) -> Vec<f64> {
    let v = sample_box(rng, dim, 1.0);
    let n = dist(&v, &vec![0.0; dim]);
    v.iter().map(|x| x * radius / n).collect()
}

fn check_radius(p: &ProblemInstance, samples: usize, extra: &[Vec<f64>]) {
    let r = p.metadata().radius_r.unwrap();
    let mut rng = rng(31);
    let dim = p.dimension();
    for _ in 0..samples {
        let x = sphere_point(&mut rng, dim, r * (1.0 - 1e-3));
        assert!(
            p.evaluate(&x).unwrap().le(0.0),
            "{}: f > 0 inside radius at {x:?}",
            p.id()
        );
    }
    let mut outside: Vec<Vec<f64>> = (0..samples)
        .map(|_| sphere_point(&mut rng, dim, r * (1.0 + 1e-3)))
        .collect();
    outside.extend(extra.iter().map(|d| d.iter().map(|v| v * r * (1.0 + 1e-3)).collect()));
    assert!(
        outside.iter().any(|x| !p.evaluate(x).unwrap().le(0.0)),
        "{}: no positive value just outside radius {r}",
        p.id()
    );
}

#[test]
fn ball_radius_is_tight() {
    let p = ball();
    let circle: Vec<Vec<f64>> = (0..3600)
        .map(|k| {
            let t = TAU * k as f64 / 3600.0;
            vec![t.cos(), t.sin()]
        })
        .collect();
    check_radius(&p, 1000, &circle);

    let c = [0.2, -0.3, 0.1];
    let cn = dist(&c, &[0.0; 3]);
    check_radius(&ball_3d(), 1000, &[c.iter().map(|v| -v / cn).collect()]);
}

#[test]
fn ball_metadata_follows_center() {
    let mut rng = rng(32);
    for _ in 0..50 {
        let c = sample_box(&mut rng, 3, 0.5);
        let p = make_ball_sqrt(BallSqrtData { center: c.clone() }).unwrap();
        let m = p.metadata();
        let cn = dist(&c, &[0.0; 3]);
        assert_eq!(m.f_star, Some(-1.0));
        assert!((m.radius_r.unwrap() - (1.0 - cn)).abs() < 1e-15);
        assert!((m.dist_to_opt.unwrap() - cn).abs() < 1e-15);
        assert_eq!(value(&p, &c), -1.0);
    }
}

fn files() -> Vec<ProblemFile> {
    vec![
        ProblemFile::parse(r#"{"kind":"lp","dimension":1,"A":[[1]],"b":[2],"c":[-1],"h":1}"#, "lp").unwrap(),
        ProblemFile::parse(
            r#"{"kind":"lp","dimension":2,"A":[[1,0],[0,1],[-1,-1]],"b":[1,2,3],"c":[-1,-1],
                "metadata":{"f_star":-4,"optimum":[1,2],"radius_R":0.7071067811865476,"dist_to_opt":2.23606797749979}}"#,
            "lp2",
        )
        .unwrap(),
        ProblemFile::parse(r#"{"kind":"ball_sqrt","dimension":2,"center":[0.5,0]}"#, "ball").unwrap(),
        ProblemFile::parse(
            r#"{"kind":"piecewise_max","dimension":1,"pieces":[{"a":[2],"b":-1},{"a":[-1],"b":-2}]}"#,
            "pw",
        )
        .unwrap(),
    ]
}

#[test]
fn loader_round_trip_preserves_oracles() {
    let dir = tempfile::tempdir().unwrap();
    for (k, file) in files().into_iter().enumerate() {
        let original = file.build("orig").unwrap();
        let path = dir.path().join(format!("p{k}.json"));
        write_problem_file(&file, &path).unwrap();
        let loaded = load_problem_file(&path).unwrap();
        assert_eq!(loaded.id(), format!("p{k}"));
        assert_eq!(loaded.metadata(), original.metadata());
        let mut rng = rng(33 + k as u64);
        for _ in 0..100 {
            let x = sample_box(&mut rng, original.dimension(), 3.0);
            assert_eq!(loaded.evaluate(&x).unwrap(), original.evaluate(&x).unwrap());
            let a = loaded.objective().subgradient(&x);
            let b = original.objective().subgradient(&x);
            assert_eq!(a, b);
        }
    }
}

#[test]
fn file_metadata_overrides_computed_values() {
    let file = ProblemFile::parse(
        r#"{"kind":"ball_sqrt","dimension":2,"center":[0.5,0],"metadata":{"radius_R":0.25,"diameter_D":3}}"#,
        "ball",
    )
    .unwrap();
    let p = file.build("ball").unwrap();
    let m = p.metadata();
    assert_eq!(m.radius_r, Some(0.25));
    assert_eq!(m.diameter_d, Some(3.0));
    assert_eq!(m.f_star, Some(-1.0));
    assert_eq!(m.dist_to_opt, Some(0.5));
}

#[test]
fn load_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"kind":"lp","dimension":1,"A":[[1]],"b":[-1],"c":[-1]}"#, "b"),
        (r#"{"kind":"ball_sqrt","dimension":2,"center":[1.5,0]}"#, "center"),
        (r#"{"kind":"ball_sqrt","dimension":2,"center":[0.5,"x"]}"#, "center"),
        (r#"{"kind":"ball_sqrt","dimension":3,"center":[0.5,0]}"#, "center"),
        (r#"{"kind":"simplex","dimension":1}"#, "kind"),
        (r#"{"kind":"piecewise_max","dimension":1,"pieces":[]}"#, "pieces"),
    ];
    for (k, (text, field)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("bad{k}.json"));
        std::fs::write(&path, text).unwrap();
        match load_problem_file(&path) {
            Err(Error::Load { field: got, .. }) => {
                assert!(
                    got.starts_with(field),
                    "case {k}: field `{got}` does not name `{field}`"
                )
            }
            other => panic!("case {k}: expected a load error, got {other:?}"),
        }
    }
}

#[test]
fn random_ball_centers_round_trip_through_json() {
    let mut rng = rng(34);
    for _ in 0..20 {
        let c: Vec<f64> = (0..2).map(|_| rng.gen_range(-0.6..0.6)).collect();
        let text = format!(
            r#"{{"kind":"ball_sqrt","dimension":2,"center":[{:?},{:?}]}}"#,
            c[0], c[1]
        );
        let file = ProblemFile::parse(&text, "ball").unwrap();
        let again = ProblemFile::parse(&file.to_json(), "ball").unwrap();
        assert_eq!(file, again);
    }
}
