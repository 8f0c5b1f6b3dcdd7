//! Oracle abstraction for an extended-real-valued convex objective.
//!
//! A [`ProblemInstance`] wraps an [`Objective`] whose strictly feasible
//! reference point sits at the origin with a strictly negative value. Raw
//! objectives that do not satisfy this can be brought into that form with
//! [`canonicalize`].

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial_geometry::GammaResult;

/// Relative tolerance for deciding that `(x, t)` lies on the graph of `f`.
pub const BOUNDARY_TOL: f64 = 1e-8;

/// A value in `ℝ ∪ {+∞}`. NaN is never representable.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub enum ExtendedValue {
    Finite(f64),
    PosInfinity,
}

impl ExtendedValue {
    /// Converts a raw oracle output. `+∞` maps to [`ExtendedValue::PosInfinity`];
    /// `-∞` saturates to the most negative finite double.
    pub fn from_f64(v: f64) -> Result<Self> {
        if v.is_nan() {
            Err(Error::Oracle("objective returned NaN".into()))
        } else if v == f64::INFINITY {
            Ok(ExtendedValue::PosInfinity)
        } else if v == f64::NEG_INFINITY {
            Ok(ExtendedValue::Finite(f64::MIN))
        } else {
            Ok(ExtendedValue::Finite(v))
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedValue::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            ExtendedValue::Finite(v) => Some(v),
            ExtendedValue::PosInfinity => None,
        }
    }

    /// `+∞` as `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    /// Multiplication by a strictly positive scalar.
    pub fn scale(&self, factor: f64) -> Self {
        debug_assert!(factor > 0.0);
        match *self {
            ExtendedValue::Finite(v) => {
                let p = factor * v;
                if p.is_finite() {
                    ExtendedValue::Finite(p)
                } else if p > 0.0 {
                    ExtendedValue::PosInfinity
                } else {
                    ExtendedValue::Finite(f64::MIN)
                }
            }
            ExtendedValue::PosInfinity => ExtendedValue::PosInfinity,
        }
    }

    /// `self ≤ bound` with `+∞ ≤ bound` false for every finite bound.
    pub fn le(&self, bound: f64) -> bool {
        match *self {
            ExtendedValue::Finite(v) => v <= bound,
            ExtendedValue::PosInfinity => false,
        }
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValue::Finite(v) => write!(f, "{v}"),
            ExtendedValue::PosInfinity => write!(f, "+inf"),
        }
    }
}

/// A point of `ℝⁿ` with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "point coordinate {i} is not finite ({})",
                coords[i]
            )));
        }
        Ok(Point(coords))
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    /// Builds a point from arithmetic results. Callers check [`Point::is_finite`]
    /// where overflow is possible.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn dot(&self, other: &Point) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.0, &self.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Point {
        Point(self.0.iter().map(|c| c * s).collect())
    }

    pub fn divided(&self, s: f64) -> Point {
        Point(self.0.iter().map(|c| c / s).collect())
    }

    /// `self + s·dir`
    pub fn add_scaled(&self, s: f64, dir: &Point) -> Point {
        Point(self.0.iter().zip(&dir.0).map(|(a, b)| a + s * b).collect())
    }

    pub fn sub(&self, other: &Point) -> Point {
        self.add_scaled(-1.0, other)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Vec<f64> {
        p.0
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// A nonzero vector `(ζ, δ)` in the normal cone of `epi f` at a boundary point.
#[derive(Debug, Clone, PartialEq)]
pub struct EpigraphNormal {
    zeta: Point,
    delta: f64,
}

impl EpigraphNormal {
    pub fn new(zeta: Point, delta: f64) -> Result<Self> {
        if !delta.is_finite() || !zeta.is_finite() {
            return Err(Error::Oracle("epigraph normal is not finite".into()));
        }
        if delta > 0.0 {
            return Err(Error::Oracle(format!(
                "epigraph normal has upward vertical component {delta}"
            )));
        }
        if delta == 0.0 && zeta.is_zero() {
            return Err(Error::Oracle("epigraph normal is zero".into()));
        }
        Ok(EpigraphNormal { zeta, delta })
    }

    pub fn zeta(&self) -> &Point {
        &self.zeta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Ground-truth quantities attached to an instance, used for accuracy
/// reporting and iteration bounds.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProblemMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_star: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimum: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist_to_opt: Option<f64>,
    #[serde(rename = "radius_R", default, skip_serializing_if = "Option::is_none")]
    pub radius_r: Option<f64>,
    #[serde(rename = "diameter_D", default, skip_serializing_if = "Option::is_none")]
    pub diameter_d: Option<f64>,
}

impl ProblemMetadata {
    /// Fields present in `other` replace the ones in `self`.
    pub fn overridden_by(&self, other: &ProblemMetadata) -> ProblemMetadata {
        ProblemMetadata {
            f_star: other.f_star.or(self.f_star),
            optimum: other.optimum.clone().or_else(|| self.optimum.clone()),
            dist_to_opt: other.dist_to_opt.or(self.dist_to_opt),
            radius_r: other.radius_r.or(self.radius_r),
            diameter_d: other.diameter_d.or(self.diameter_d),
        }
    }
}

/// The oracles describing a lower-semicontinuous convex `f : ℝⁿ → ℝ ∪ {+∞}`.
///
/// Implementations must be pure.
pub trait Objective: Send + Sync + fmt::Debug {
    fn dimension(&self) -> usize;

    /// `f(x)`, or `f64::INFINITY` outside `dom f`.
    fn value(&self, x: &[f64]) -> f64;

    /// An outward normal of `dom f` when `x` lies on (or within tolerance of)
    /// the boundary of the domain, `None` otherwise.
    fn domain_normal(&self, x: &[f64]) -> Option<Vec<f64>>;

    /// A subgradient of `f` at a point of `dom f`.
    fn subgradient(&self, x: &[f64]) -> Vec<f64>;

    /// Exact `γ_z(x)` when the family admits one.
    fn closed_form_gamma(&self, _x: &[f64], _z: f64) -> Option<GammaResult> {
        None
    }
}

/// An objective with `0 ∈ int dom f` and `f(0) < 0`, plus optional ground truth.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    id: String,
    objective: Arc<dyn Objective>,
    metadata: ProblemMetadata,
}

impl ProblemInstance {
    pub fn new(id: impl Into<String>, objective: Arc<dyn Objective>) -> Result<Self> {
        let dim = objective.dimension();
        if dim == 0 {
            return Err(Error::construction("dimension", "must be positive"));
        }
        let f0 = ExtendedValue::from_f64(objective.value(&vec![0.0; dim]))?;
        match f0 {
            ExtendedValue::Finite(v) if v < 0.0 => {}
            other => {
                return Err(Error::Precondition(format!(
                    "objective at the origin must be finite and negative, got {other}"
                )))
            }
        }
        Ok(ProblemInstance {
            id: id.into(),
            objective,
            metadata: ProblemMetadata::default(),
        })
    }

    /// Attaches metadata after checking its internal consistency.
    pub fn with_metadata(mut self, metadata: ProblemMetadata) -> Result<Self> {
        self.validate_metadata(&metadata)?;
        self.metadata = metadata;
        Ok(self)
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    fn validate_metadata(&self, m: &ProblemMetadata) -> Result<()> {
        for (name, v) in [("radius_R", m.radius_r), ("diameter_D", m.diameter_d)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::construction(name, "must be positive and finite"));
                }
            }
        }
        if let Some(d) = m.dist_to_opt {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::construction("dist_to_opt", "must be nonnegative"));
            }
        }
        if let Some(f) = m.f_star {
            if !f.is_finite() {
                return Err(Error::construction("f_star", "must be finite"));
            }
        }
        if let Some(opt) = &m.optimum {
            let f_star = m
                .f_star
                .ok_or_else(|| Error::construction("f_star", "required when optimum is given"))?;
            let fv = self
                .evaluate(opt)
                .map_err(|e| Error::construction("optimum", e.to_string()))?;
            match fv {
                ExtendedValue::Finite(v) if (v - f_star).abs() <= 1e-8 * f_star.abs().max(1.0) => {}
                other => {
                    return Err(Error::construction(
                        "optimum",
                        format!("objective value {other} does not match f_star {f_star}"),
                    ))
                }
            }
        }
        Ok(())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dimension(&self) -> usize {
        self.objective.dimension()
    }

    pub fn metadata(&self) -> &ProblemMetadata {
        &self.metadata
    }

    pub fn objective(&self) -> &Arc<dyn Objective> {
        &self.objective
    }

    pub fn origin(&self) -> Point {
        Point::origin(self.dimension())
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `f(x)`; `+∞` exactly when `x ∉ dom f`.
    pub fn evaluate(&self, x: &[f64]) -> Result<ExtendedValue> {
        self.check_dim(x)?;
        ExtendedValue::from_f64(self.objective.value(x))
    }

    pub(crate) fn value_unchecked(&self, x: &[f64]) -> Result<ExtendedValue> {
        ExtendedValue::from_f64(self.objective.value(x))
    }

    /// `f(0)`, finite and negative by construction.
    pub fn value_at_origin(&self) -> f64 {
        self.objective.value(&vec![0.0; self.dimension()])
    }

    /// A normal `(ζ, δ)` of `epi f` at the boundary point `(x, t)`.
    ///
    /// Constraint-active points (on the boundary of `dom f` with `f(x) ≤ t`)
    /// return `(g, 0)` with `g` the domain normal; objective-active points with
    /// `|f(x) − t| ≤ 1e-8·max(1, |t|)` return `(∂f(x), −1)`.
    pub fn boundary_normal(&self, x: &[f64], t: f64) -> Result<EpigraphNormal> {
        self.check_dim(x)?;
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!("epigraph height {t} is not finite")));
        }
        let fx = self.evaluate(x)?;
        let tol = BOUNDARY_TOL * t.abs().max(1.0);
        if let Some(g) = self.nonzero_domain_normal(x) {
            let within = match fx {
                ExtendedValue::PosInfinity => true,
                ExtendedValue::Finite(v) => v <= t + tol,
            };
            if within {
                return EpigraphNormal::new(g, 0.0);
            }
        }
        let fv = match fx {
            ExtendedValue::PosInfinity => {
                return Err(Error::NotOnBoundary {
                    what: "point outside the domain",
                    t,
                    fx: f64::INFINITY,
                })
            }
            ExtendedValue::Finite(v) => v,
        };
        if fv - t > tol {
            return Err(Error::NotOnBoundary {
                what: "point above the epigraph",
                t,
                fx: fv,
            });
        }
        if t - fv > tol {
            return Err(Error::NotOnBoundary {
                what: "point strictly inside the epigraph",
                t,
                fx: fv,
            });
        }
        self.graph_normal(x)
    }

    /// Normal of `epi f` at `(x, f(x))`, or the domain normal when `x` is on the
    /// boundary of `dom f`. Used after a radial line search where the height is
    /// only known up to the bracket width.
    pub(crate) fn support_normal(&self, x: &[f64]) -> Result<EpigraphNormal> {
        if let Some(g) = self.nonzero_domain_normal(x) {
            return EpigraphNormal::new(g, 0.0);
        }
        self.graph_normal(x)
    }

    fn graph_normal(&self, x: &[f64]) -> Result<EpigraphNormal> {
        let g = self.objective.subgradient(x);
        if g.len() != self.dimension() {
            return Err(Error::Oracle("subgradient has wrong dimension".into()));
        }
        EpigraphNormal::new(Point::from_raw(g), -1.0)
    }

    fn nonzero_domain_normal(&self, x: &[f64]) -> Option<Point> {
        self.objective
            .domain_normal(x)
            .map(Point::from_raw)
            .filter(|g| !g.is_zero() && g.dim() == self.dimension())
    }

    pub fn closed_form_gamma(&self, x: &[f64], z: f64) -> Option<GammaResult> {
        self.objective.closed_form_gamma(x, z)
    }
}

/// `x ↦ f_raw(x + x0) − f_raw(x0) − h`
#[derive(Debug)]
struct Shifted {
    raw: Arc<dyn Objective>,
    x0: Vec<f64>,
    offset: f64,
}

impl Shifted {
    fn translate(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.x0).map(|(a, b)| a + b).collect()
    }
}

impl Objective for Shifted {
    fn dimension(&self) -> usize {
        self.raw.dimension()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.raw.value(&self.translate(x)) - self.offset
    }

    fn domain_normal(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.raw.domain_normal(&self.translate(x))
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        self.raw.subgradient(&self.translate(x))
    }
}

/// Moves the interior point `x0` to the origin and shifts values so that the
/// new objective is `−h` there.
pub fn canonicalize(raw: Arc<dyn Objective>, x0: &Point, h: f64) -> Result<ProblemInstance> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("shift h must be positive, got {h}")));
    }
    if x0.dim() != raw.dimension() {
        return Err(Error::DimensionMismatch {
            expected: raw.dimension(),
            got: x0.dim(),
        });
    }
    let f_x0 = match ExtendedValue::from_f64(raw.value(x0))? {
        ExtendedValue::Finite(v) => v,
        ExtendedValue::PosInfinity => {
            return Err(Error::Precondition(
                "raw objective is +inf at the interior point".into(),
            ))
        }
    };
    let shifted = Shifted {
        raw,
        x0: x0.to_vec(),
        offset: f_x0 + h,
    };
    ProblemInstance::new("canonical", Arc::new(shifted))
}
