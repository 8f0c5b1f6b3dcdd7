//! Built-in problem families with known ground truth, and the JSON problem-file
//! loader.
//!
//! * `lp`: `f(x) = c·x − h` on `{x : Ax ≤ b}` with `b > 0`.
//! * `ball_sqrt`: `f(x) = −√(1 − ‖x − c‖²)` on the closed unit ball around
//!   `c`, `‖c‖ < 1`. Its gradient blows up at the sphere, so `f` is neither
//!   smooth nor Lipschitz on its domain.
//! * `piecewise_max`: `f(x) = maxᵢ (aᵢ·x + bᵢ)` with every `bᵢ < 0`.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem_model::{dot, norm, Objective, Point, ProblemInstance, ProblemMetadata, BOUNDARY_TOL};
use crate::radial_geometry::GammaResult;

fn default_h() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgramData {
    #[serde(rename = "A", default)]
    pub a: Vec<Vec<f64>>,
    #[serde(default)]
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    #[serde(default = "default_h")]
    pub h: f64,
}

impl LinearProgramData {
    fn validate(&self) -> Result<()> {
        let n = self.c.len();
        if n == 0 {
            return Err(Error::construction("c", "objective vector is empty"));
        }
        check_finite("c", &self.c)?;
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::construction("h", format!("must be positive, got {}", self.h)));
        }
        if self.a.len() != self.b.len() {
            return Err(Error::construction(
                "b",
                format!("{} entries for {} constraint rows", self.b.len(), self.a.len()),
            ));
        }
        for (i, row) in self.a.iter().enumerate() {
            if row.len() != n {
                return Err(Error::construction(
                    format!("A[{i}]"),
                    format!("row has {} entries, expected {n}", row.len()),
                ));
            }
            check_finite(&format!("A[{i}]"), row)?;
        }
        for (i, &bi) in self.b.iter().enumerate() {
            if !(bi > 0.0 && bi.is_finite()) {
                return Err(Error::construction(
                    format!("b[{i}]"),
                    format!("must be strictly positive so the origin is interior, got {bi}"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSqrtData {
    pub center: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Piece {
    pub a: Vec<f64>,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseMaxData {
    pub pieces: Vec<Piece>,
}

fn check_finite(field: &str, v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(Error::construction(format!("{field}[{i}]"), "must be finite")),
        None => Ok(()),
    }
}

#[derive(Debug)]
struct LinearProgram {
    data: LinearProgramData,
}

impl Objective for LinearProgram {
    fn dimension(&self) -> usize {
        self.data.c.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let feasible = self.data.a.iter().zip(&self.data.b).all(|(row, &bi)| dot(row, x) <= bi);
        if feasible {
            dot(&self.data.c, x) - self.data.h
        } else {
            f64::INFINITY
        }
    }

    fn domain_normal(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.data
            .a
            .iter()
            .zip(&self.data.b)
            .find(|(row, &bi)| dot(row, x) >= bi - BOUNDARY_TOL * bi.max(1.0))
            .map(|(row, _)| row.clone())
    }

    fn subgradient(&self, _x: &[f64]) -> Vec<f64> {
        self.data.c.clone()
    }

    fn closed_form_gamma(&self, x: &[f64], z: f64) -> Option<GammaResult> {
        Some(lp_gamma_closed_form(&self.data, x, z))
    }
}

/// `γ_z(x) = max((c·x − z)/h, maxᵢ Aᵢx/bᵢ)`, a zero when that maximum is `≤ 0`.
pub fn lp_gamma_closed_form(data: &LinearProgramData, x: &[f64], z: f64) -> GammaResult {
    let objective_term = (dot(&data.c, x) - z) / data.h;
    let m = data
        .a
        .iter()
        .zip(&data.b)
        .map(|(row, &bi)| dot(row, x) / bi)
        .fold(objective_term, f64::max);
    if m > 0.0 {
        GammaResult::Positive {
            gamma: m,
            bracket_width: 0.0,
        }
    } else {
        GammaResult::ZeroDetected {
            witness_gamma: f64::MIN_POSITIVE,
        }
    }
}

/// Interval `{s : slopeᵢ·s + interceptᵢ ≤ level ∀i}` on the line.
fn sublevel_interval(terms: &[(f64, f64)], level: f64) -> (f64, f64) {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for &(slope, intercept) in terms {
        if slope > 0.0 {
            hi = hi.min((level - intercept) / slope);
        } else if slope < 0.0 {
            lo = lo.max((level - intercept) / slope);
        }
    }
    (lo, hi)
}

fn positive_finite(v: f64) -> Option<f64> {
    (v > 0.0 && v.is_finite()).then_some(v)
}

fn lp_ground_truth(data: &LinearProgramData) -> ProblemMetadata {
    if data.c.len() != 1 {
        return ProblemMetadata::default();
    }
    let c = data.c[0];
    let h = data.h;
    let constraints: Vec<(f64, f64)> = data.a.iter().zip(&data.b).map(|(r, &b)| (r[0], -b)).collect();
    let (lo, hi) = sublevel_interval(&constraints, 0.0);
    let mut meta = ProblemMetadata::default();

    let r_obj = if c != 0.0 { h / c.abs() } else { f64::INFINITY };
    meta.radius_r = positive_finite(hi.min(-lo).min(r_obj));

    let x_star = if c < 0.0 {
        hi.is_finite().then_some(hi)
    } else if c > 0.0 {
        lo.is_finite().then_some(lo)
    } else {
        Some(0.0)
    };
    if let Some(mut xs) = x_star {
        while data.a.iter().zip(&data.b).any(|(r, &b)| r[0] * xs > b) {
            xs = if xs > 0.0 { xs.next_down() } else { xs.next_up() };
        }
        meta.f_star = Some(c * xs - h);
        meta.optimum = Some(Point::from_raw(vec![xs]));
        meta.dist_to_opt = Some(xs.abs());
    }
    // {f ≤ f(0)} = {c·x ≤ 0} ∩ dom f
    meta.diameter_d = positive_finite(if c < 0.0 {
        hi
    } else if c > 0.0 {
        -lo
    } else {
        hi - lo
    });
    meta
}

/// `f(x) = c·x − h` on `{Ax ≤ b}`. Ground truth is derived for 1-D programs;
/// higher-dimensional ones need externally supplied metadata.
pub fn make_linear_program(data: LinearProgramData) -> Result<ProblemInstance> {
    data.validate()?;
    let meta = lp_ground_truth(&data);
    ProblemInstance::new("lp", Arc::new(LinearProgram { data }))?.with_metadata(meta)
}

#[derive(Debug)]
struct BallSqrt {
    center: Vec<f64>,
}

impl BallSqrt {
    fn offset(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.center).map(|(a, c)| a - c).collect()
    }
}

impl Objective for BallSqrt {
    fn dimension(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let d = self.offset(x);
        let r2 = dot(&d, &d);
        if r2 <= 1.0 {
            -(1.0 - r2).sqrt()
        } else {
            f64::INFINITY
        }
    }

    fn domain_normal(&self, x: &[f64]) -> Option<Vec<f64>> {
        let d = self.offset(x);
        (norm(&d) >= 1.0 - BOUNDARY_TOL).then_some(d)
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        let d = self.offset(x);
        let s = (1.0 - dot(&d, &d)).max(f64::MIN_POSITIVE).sqrt();
        d.into_iter().map(|v| v / s).collect()
    }
}

/// `f(x) = −√(1 − ‖x − c‖²)` on the unit ball around `c`.
///
/// Ground truth: `f* = −1` at `c`, `dist = ‖c‖`, `R = 1 − ‖c‖` (the largest
/// origin-centred ball inside the domain) and `D = 2‖c‖`.
pub fn make_ball_sqrt(data: BallSqrtData) -> Result<ProblemInstance> {
    if data.center.is_empty() {
        return Err(Error::construction("center", "must be non-empty"));
    }
    check_finite("center", &data.center)?;
    let c_norm = norm(&data.center);
    if c_norm >= 1.0 {
        return Err(Error::construction(
            "center",
            format!("norm {c_norm} must be strictly below 1"),
        ));
    }
    let meta = ProblemMetadata {
        f_star: Some(-1.0),
        optimum: Some(Point::from_raw(data.center.clone())),
        dist_to_opt: Some(c_norm),
        radius_r: Some(1.0 - c_norm),
        diameter_d: positive_finite(2.0 * c_norm),
    };
    ProblemInstance::new("ball_sqrt", Arc::new(BallSqrt { center: data.center }))?.with_metadata(meta)
}

#[derive(Debug)]
struct PiecewiseMax {
    pieces: Vec<Piece>,
}

impl PiecewiseMax {
    fn eval(&self, x: &[f64]) -> f64 {
        self.pieces
            .iter()
            .map(|p| dot(&p.a, x) + p.b)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

impl Objective for PiecewiseMax {
    fn dimension(&self) -> usize {
        self.pieces[0].a.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x)
    }

    fn domain_normal(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        let m = self.eval(x);
        let tol = 1e-12 * m.abs().max(1.0);
        self.pieces
            .iter()
            .find(|p| dot(&p.a, x) + p.b >= m - tol)
            .map(|p| p.a.clone())
            .unwrap_or_else(|| self.pieces[0].a.clone())
    }
}

/// Solves a 3×3 system by Cramer's rule.
fn solve3(m: [[f64; 3]; 3], rhs: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    if d.abs() < 1e-12 {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][col] = rhs[row];
        }
        *slot = det(&mc) / d;
    }
    Some(out)
}

/// Brute-force ground truth for polyhedral objectives of dimension ≤ 2.
fn piecewise_ground_truth(pw: &PiecewiseMax) -> ProblemMetadata {
    let pieces = &pw.pieces;
    let n = pw.dimension();
    let mut meta = ProblemMetadata {
        // f ≤ 0 on the ball of radius r iff bᵢ + r‖aᵢ‖ ≤ 0 for every piece.
        radius_r: positive_finite(
            pieces
                .iter()
                .filter(|p| norm(&p.a) > 0.0)
                .map(|p| -p.b / norm(&p.a))
                .fold(f64::INFINITY, f64::min),
        ),
        ..Default::default()
    };
    if n > 2 {
        return meta;
    }

    // Bounded below iff max_i aᵢ·d ≥ 0 for every direction d. The minimum of
    // that maximum over unit directions sits at some −aᵢ/‖aᵢ‖ or where two
    // pieces tie.
    let mut directions: Vec<Vec<f64>> = Vec::new();
    if n == 1 {
        directions.push(vec![1.0]);
        directions.push(vec![-1.0]);
    } else {
        for (i, p) in pieces.iter().enumerate() {
            let pn = norm(&p.a);
            if pn > 0.0 {
                directions.push(p.a.iter().map(|v| -v / pn).collect());
            }
            for q in &pieces[i + 1..] {
                let diff = [p.a[0] - q.a[0], p.a[1] - q.a[1]];
                let dn = norm(&diff);
                if dn > 0.0 {
                    directions.push(vec![-diff[1] / dn, diff[0] / dn]);
                    directions.push(vec![diff[1] / dn, -diff[0] / dn]);
                }
            }
        }
    }
    let descends = directions
        .iter()
        .any(|d| pieces.iter().map(|p| dot(&p.a, d)).fold(f64::NEG_INFINITY, f64::max) < -1e-12);
    if descends {
        return meta;
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |x: Vec<f64>| {
        let v = pw.eval(&x);
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, x));
        }
    };

    // Rank of the slopes decides how the optimum is located.
    let span_dir = pieces.iter().map(|p| &p.a).find(|a| norm(a) > 0.0).cloned();
    let full_rank = n == 2
        && pieces
            .iter()
            .flat_map(|p| pieces.iter().map(move |q| p.a[0] * q.a[1] - p.a[1] * q.a[0]))
            .any(|det| det.abs() > 1e-12);

    match span_dir {
        None => consider(vec![0.0; n]),
        Some(u) if !full_rank => {
            let un = norm(&u);
            let u: Vec<f64> = u.iter().map(|v| v / un).collect();
            let slopes: Vec<f64> = pieces.iter().map(|p| dot(&p.a, &u)).collect();
            for i in 0..pieces.len() {
                for j in i + 1..pieces.len() {
                    if slopes[i] != slopes[j] {
                        let s = (pieces[j].b - pieces[i].b) / (slopes[i] - slopes[j]);
                        consider(u.iter().map(|v| v * s).collect());
                    }
                }
            }
        }
        Some(_) => {
            let m = pieces.len();
            for i in 0..m {
                for j in i + 1..m {
                    for k in j + 1..m {
                        let row = |p: &Piece| [p.a[0], p.a[1], -1.0];
                        if let Some(sol) = solve3(
                            [row(&pieces[i]), row(&pieces[j]), row(&pieces[k])],
                            [-pieces[i].b, -pieces[j].b, -pieces[k].b],
                        ) {
                            consider(vec![sol[0], sol[1]]);
                        }
                    }
                }
            }
        }
    }

    let Some((f_star, x_star)) = best else {
        return meta;
    };
    meta.f_star = Some(f_star);
    if n == 1 {
        let terms: Vec<(f64, f64)> = pieces.iter().map(|p| (p.a[0], p.b)).collect();
        let (lo, hi) = sublevel_interval(&terms, f_star);
        let nearest = if lo <= hi { 0.0_f64.clamp(lo, hi) } else { x_star[0] };
        meta.optimum = Some(Point::from_raw(vec![nearest]));
        meta.dist_to_opt = Some(nearest.abs());
        let (dlo, dhi) = sublevel_interval(&terms, pw.eval(&[0.0]));
        meta.diameter_d = positive_finite(dhi - dlo);
    } else {
        meta.optimum = Some(Point::from_raw(x_star));
    }
    meta
}

/// `f(x) = maxᵢ (aᵢ·x + bᵢ)`; `f*` and an optimum are brute-forced for `n ≤ 2`.
pub fn make_piecewise_max(data: PiecewiseMaxData) -> Result<ProblemInstance> {
    let Some(first) = data.pieces.first() else {
        return Err(Error::construction("pieces", "piece list is empty"));
    };
    let n = first.a.len();
    if n == 0 {
        return Err(Error::construction("pieces[0].a", "must be non-empty"));
    }
    for (i, p) in data.pieces.iter().enumerate() {
        if p.a.len() != n {
            return Err(Error::construction(
                format!("pieces[{i}].a"),
                format!("has {} entries, expected {n}", p.a.len()),
            ));
        }
        check_finite(&format!("pieces[{i}].a"), &p.a)?;
        if !(p.b < 0.0 && p.b.is_finite()) {
            return Err(Error::construction(
                format!("pieces[{i}].b"),
                format!("must be strictly negative, got {}", p.b),
            ));
        }
    }
    let pw = PiecewiseMax { pieces: data.pieces };
    let meta = piecewise_ground_truth(&pw);
    ProblemInstance::new("piecewise_max", Arc::new(pw))?.with_metadata(meta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LpFile {
    pub dimension: usize,
    #[serde(rename = "A", default)]
    pub a: Vec<Vec<f64>>,
    #[serde(default)]
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<ProblemMetadata>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSqrtFile {
    pub dimension: usize,
    pub center: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<ProblemMetadata>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseMaxFile {
    pub dimension: usize,
    pub pieces: Vec<Piece>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<ProblemMetadata>,
}

/// On-disk problem description, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemFile {
    Lp(LpFile),
    BallSqrt(BallSqrtFile),
    PiecewiseMax(PiecewiseMaxFile),
}

impl ProblemFile {
    fn parts(&self) -> (usize, Option<&ProblemMetadata>) {
        match self {
            ProblemFile::Lp(f) => (f.dimension, f.metadata.as_ref()),
            ProblemFile::BallSqrt(f) => (f.dimension, f.metadata.as_ref()),
            ProblemFile::PiecewiseMax(f) => (f.dimension, f.metadata.as_ref()),
        }
    }

    /// Builds the instance; metadata in the file overrides computed values.
    pub fn build(&self, id: &str) -> Result<ProblemInstance> {
        let (dimension, file_meta) = self.parts();
        let (instance, payload_dim, dim_field) = match self {
            ProblemFile::Lp(f) => (
                make_linear_program(LinearProgramData {
                    a: f.a.clone(),
                    b: f.b.clone(),
                    c: f.c.clone(),
                    h: f.h,
                }),
                f.c.len(),
                "c",
            ),
            ProblemFile::BallSqrt(f) => (
                make_ball_sqrt(BallSqrtData {
                    center: f.center.clone(),
                }),
                f.center.len(),
                "center",
            ),
            ProblemFile::PiecewiseMax(f) => (
                make_piecewise_max(PiecewiseMaxData {
                    pieces: f.pieces.clone(),
                }),
                f.pieces.first().map_or(0, |p| p.a.len()),
                "pieces[0].a",
            ),
        };
        if payload_dim != dimension && payload_dim != 0 {
            return Err(Error::construction(
                dim_field,
                format!("has {payload_dim} entries but dimension is {dimension}"),
            ));
        }
        let instance = instance?.with_id(id);
        match file_meta {
            Some(m) => {
                let merged = instance.metadata().overridden_by(m);
                instance.with_metadata(merged)
            }
            None => Ok(instance),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialize")
    }

    /// Parses and validates a problem document; errors carry the offending field path.
    pub fn parse(text: &str, origin: &str) -> Result<ProblemFile> {
        let load_err = |field: String, message: String| Error::Load {
            path: origin.to_string(),
            field,
            message,
        };
        let mut value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| load_err("<document>".into(), e.to_string()))?;
        let obj = value
            .as_object_mut()
            .ok_or_else(|| load_err("<document>".into(), "expected a JSON object".into()))?;
        let kind = match obj.remove("kind") {
            Some(serde_json::Value::String(s)) => s,
            Some(_) => return Err(load_err("kind".into(), "must be a string".into())),
            None => return Err(load_err("kind".into(), "missing field".into())),
        };
        fn typed<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> std::result::Result<T, (String, String)> {
            serde_path_to_error::deserialize(v).map_err(|e| (e.path().to_string(), e.inner().to_string()))
        }
        let parsed = match kind.as_str() {
            "lp" => typed(value).map(ProblemFile::Lp),
            "ball_sqrt" => typed(value).map(ProblemFile::BallSqrt),
            "piecewise_max" => typed(value).map(ProblemFile::PiecewiseMax),
            other => return Err(load_err("kind".into(), format!("unknown problem kind `{other}`"))),
        };
        parsed.map_err(|(field, message)| load_err(field, message))
    }
}

/// Reads, validates and builds a problem file. The instance id is the file stem.
pub fn load_problem_file(path: impl AsRef<Path>) -> Result<ProblemInstance> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Error::Load {
        path: shown.clone(),
        field: "<file>".into(),
        message: e.to_string(),
    })?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "problem".into());
    let file = ProblemFile::parse(&text, &shown)?;
    file.build(&id).map_err(|e| match e {
        Error::Construction { field, reason } => Error::Load {
            path: shown,
            field,
            message: reason,
        },
        other => Error::Load {
            path: shown,
            field: "<instance>".into(),
            message: other.to_string(),
        },
    })
}

pub fn write_problem_file(file: &ProblemFile, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, file.to_json()).map_err(|e| Error::Io(e.to_string()))
}
