//! Geodesic segments, rays and lines, with distance, angle and projection
//! primitives.
//!
//! Every geodesic is stored as `gamma(t) = cosh(t) * basepoint + sinh(t) *
//! unit_tangent` together with a parameter interval `[t_min, t_max]`
//! (infinite bounds for rays/lines). `unit_tangent` is Minkowski-orthogonal
//! to `basepoint` with `<v,v> = +1`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::minkowski::{mink, tangent_part};
use crate::point::{HPoint, IdealPoint};
use crate::tol::FORM_TOL;

/// Either a point of H^n or an ideal boundary point.
#[derive(Debug, Clone, PartialEq)]
pub enum Endpoint {
    Interior(HPoint),
    Ideal(IdealPoint),
}

impl Endpoint {
    pub fn as_interior(&self) -> Option<&HPoint> {
        match self {
            Endpoint::Interior(p) => Some(p),
            Endpoint::Ideal(_) => None,
        }
    }

    pub fn as_ideal(&self) -> Option<&IdealPoint> {
        match self {
            Endpoint::Ideal(xi) => Some(xi),
            Endpoint::Interior(_) => None,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Endpoint::Interior(p) => p.dim(),
            Endpoint::Ideal(xi) => xi.dim(),
        }
    }

    fn raw(&self) -> &DVector<f64> {
        match self {
            Endpoint::Interior(p) => p.coords(),
            Endpoint::Ideal(xi) => xi.coords(),
        }
    }
}

impl From<HPoint> for Endpoint {
    fn from(p: HPoint) -> Self {
        Endpoint::Interior(p)
    }
}

impl From<IdealPoint> for Endpoint {
    fn from(xi: IdealPoint) -> Self {
        Endpoint::Ideal(xi)
    }
}

/// Hyperbolic distance `arccosh(-<x,y>)`. Nearby points go through the
/// chordal form `2 asinh(|x - y|_M / 2)`, which stays accurate where the
/// arccosh form bottoms out at ~1e-8.
pub fn dist(x: &HPoint, y: &HPoint) -> f64 {
    let c = -mink(x.coords(), y.coords());
    if c < 1.1 {
        let d = x.coords() - y.coords();
        let q = mink(&d, &d).max(0.0);
        2.0 * (q.sqrt() / 2.0).asinh()
    } else {
        c.acosh()
    }
}

/// Unit tangent at `p` pointing toward `q` (interior or ideal). Errors when
/// the target coincides with `p`.
pub fn direction(p: &HPoint, q: &Endpoint) -> Result<DVector<f64>> {
    let t = tangent_part(q.raw(), p.coords());
    let n2 = mink(&t, &t);
    if n2 <= FORM_TOL * FORM_TOL {
        return Err(Error::Degenerate(
            "direction target coincides with the base point".into(),
        ));
    }
    Ok(t / n2.sqrt())
}

/// Riemannian angle at `p` between the segments/rays `p a` and `p b`,
/// in [0, pi].
pub fn angle_at(p: &HPoint, a: &Endpoint, b: &Endpoint) -> Result<f64> {
    let u = direction(p, a)?;
    let v = direction(p, b)?;
    Ok(mink(&u, &v).clamp(-1.0, 1.0).acos())
}

/// A geodesic segment, ray or complete line.
#[derive(Debug, Clone)]
pub struct GeodesicSegment {
    basepoint: HPoint,
    unit_tangent: DVector<f64>,
    t_min: f64,
    t_max: f64,
}

impl GeodesicSegment {
    /// Segment between two interior points, parameterized from `start`.
    pub fn between(start: &HPoint, end: &HPoint) -> Result<Self> {
        let len = dist(start, end);
        if len <= 0.0 {
            return Err(Error::Degenerate("zero-length segment".into()));
        }
        let v = direction(start, &Endpoint::Interior(end.clone()))?;
        Ok(GeodesicSegment {
            basepoint: start.clone(),
            unit_tangent: v,
            t_min: 0.0,
            t_max: len,
        })
    }

    /// Ray from an interior point toward an ideal point.
    pub fn ray(start: &HPoint, toward: &IdealPoint) -> Result<Self> {
        let v = direction(start, &Endpoint::Ideal(toward.clone()))?;
        Ok(GeodesicSegment {
            basepoint: start.clone(),
            unit_tangent: v,
            t_min: 0.0,
            t_max: f64::INFINITY,
        })
    }

    /// Complete line between two distinct ideal points, oriented from `xi`
    /// to `eta`; the basepoint is the point of the line "midway" between the
    /// two null directions.
    pub fn line(xi: &IdealPoint, eta: &IdealPoint) -> Result<Self> {
        let ip = mink(xi.coords(), eta.coords());
        if ip.abs() <= FORM_TOL {
            return Err(Error::Degenerate("coincident ideal endpoints".into()));
        }
        let base = HPoint::from_timelike(xi.coords() + eta.coords())?;
        let dir = eta.coords() - xi.coords();
        let n2 = mink(&dir, &dir);
        let v = &dir / n2.sqrt();
        // Scale consistency: with base = (xi+eta)/s the tangent above is
        // orthogonal to base and unit; gamma(t) -> eta as t -> +inf.
        let v = tangent_part(&v, base.coords());
        let v = &v / mink(&v, &v).sqrt();
        Ok(GeodesicSegment {
            basepoint: base,
            unit_tangent: v,
            t_min: f64::NEG_INFINITY,
            t_max: f64::INFINITY,
        })
    }

    /// Segment / ray / line from generic endpoints.
    pub fn connect(a: &Endpoint, b: &Endpoint) -> Result<Self> {
        match (a, b) {
            (Endpoint::Interior(p), Endpoint::Interior(q)) => Self::between(p, q),
            (Endpoint::Interior(p), Endpoint::Ideal(xi)) => Self::ray(p, xi),
            (Endpoint::Ideal(xi), Endpoint::Interior(p)) => {
                let r = Self::ray(p, xi)?;
                Ok(r.reversed())
            }
            (Endpoint::Ideal(xi), Endpoint::Ideal(eta)) => Self::line(xi, eta),
        }
    }

    /// From explicit data (used by the JSON layer); validates orthonormality.
    pub fn from_parts(basepoint: HPoint, unit_tangent: DVector<f64>, length: f64) -> Result<Self> {
        let vt = mink(&unit_tangent, basepoint.coords());
        let vv = mink(&unit_tangent, &unit_tangent);
        if vt.abs() > 1e-8 || (vv - 1.0).abs() > 1e-8 {
            return Err(Error::Model(
                "tangent is not unit / not orthogonal to the basepoint".into(),
            ));
        }
        if length < 0.0 {
            return Err(Error::Domain("negative length".into()));
        }
        Ok(GeodesicSegment {
            basepoint,
            unit_tangent,
            t_min: 0.0,
            t_max: length,
        })
    }

    pub fn basepoint(&self) -> &HPoint {
        &self.basepoint
    }

    pub fn unit_tangent(&self) -> &DVector<f64> {
        &self.unit_tangent
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Arc length (may be +infinity).
    pub fn length(&self) -> f64 {
        self.t_max - self.t_min
    }

    pub fn is_complete(&self) -> bool {
        self.t_min.is_infinite() && self.t_max.is_infinite()
    }

    /// Point at parameter `t` (must be finite and inside the interval up to
    /// FORM_TOL slack).
    pub fn eval(&self, t: f64) -> Result<HPoint> {
        let p = self.basepoint.coords() * t.cosh() + &self.unit_tangent * t.sinh();
        HPoint::from_timelike(p)
    }

    /// Point at arc length `s` from the start (start must be interior).
    pub fn point_at(&self, s: f64) -> Result<HPoint> {
        if self.t_min.is_infinite() {
            return Err(Error::Domain("line has no start point".into()));
        }
        self.eval(self.t_min + s)
    }

    /// The start endpoint (ideal for lines / reversed rays).
    pub fn start(&self) -> Endpoint {
        self.endpoint_at(self.t_min, -1.0)
    }

    /// The end endpoint (ideal for rays and lines).
    pub fn end(&self) -> Endpoint {
        self.endpoint_at(self.t_max, 1.0)
    }

    fn endpoint_at(&self, t: f64, sign: f64) -> Endpoint {
        if t.is_finite() {
            Endpoint::Interior(self.eval(t).expect("finite parameter on geodesic"))
        } else {
            let v = self.basepoint.coords() + &self.unit_tangent * sign;
            Endpoint::Ideal(IdealPoint::from_null(v).expect("null endpoint direction"))
        }
    }

    /// Ideal point in the forward direction of the parameterization.
    pub fn forward_ideal(&self) -> IdealPoint {
        let v = self.basepoint.coords() + &self.unit_tangent;
        IdealPoint::from_null(v).expect("null direction")
    }

    /// Ideal point in the backward direction.
    pub fn backward_ideal(&self) -> IdealPoint {
        let v = self.basepoint.coords() - &self.unit_tangent;
        IdealPoint::from_null(v).expect("null direction")
    }

    /// Same geodesic with the orientation flipped.
    pub fn reversed(&self) -> Self {
        GeodesicSegment {
            basepoint: self.basepoint.clone(),
            unit_tangent: -self.unit_tangent.clone(),
            t_min: -self.t_max,
            t_max: -self.t_min,
        }
    }

    /// The complete line carrying this segment.
    pub fn extended(&self) -> Self {
        GeodesicSegment {
            basepoint: self.basepoint.clone(),
            unit_tangent: self.unit_tangent.clone(),
            t_min: f64::NEG_INFINITY,
            t_max: f64::INFINITY,
        }
    }

    /// Signed parameter of the Minkowski-orthogonal foot of `x` on the
    /// complete line through this geodesic, i.e. the unconstrained minimizer
    /// of `t -> d(x, gamma(t))`.
    pub fn foot_parameter(&self, x: &HPoint) -> f64 {
        let a = -mink(x.coords(), self.basepoint.coords()); // cosh component
        let b = mink(x.coords(), &self.unit_tangent); // sinh component
        // d(x, gamma(t)) has cosh = a cosh t - b sinh t, minimized at
        // tanh t = b / a; a >= 1 > |b| for any x (the plane section is
        // timelike), so atanh is safe.
        (b / a).atanh()
    }

    pub fn dim(&self) -> usize {
        self.basepoint.dim()
    }
}

/// Nearest point of `g` to `x` together with the distance; the parameter is
/// clamped to the segment, so for segments the nearest endpoint is returned
/// when the orthogonal foot falls outside.
pub fn project_to_geodesic(x: &HPoint, g: &GeodesicSegment) -> Result<(HPoint, f64)> {
    let t = g.foot_parameter(x).clamp(g.t_min, g.t_max);
    if !t.is_finite() {
        return Err(Error::Domain(
            "projection parameter escaped to infinity".into(),
        ));
    }
    let foot = g.eval(t)?;
    let d = dist(x, &foot);
    Ok((foot, d))
}

/// Distance from a point to a geodesic (clamped to its parameter interval).
pub fn dist_to_geodesic(x: &HPoint, g: &GeodesicSegment) -> f64 {
    project_to_geodesic(x, g).map(|(_, d)| d).unwrap_or(f64::INFINITY)
}
