//! Totally geodesic hyperplanes of H^n, in particular perpendicular
//! bisectors `Bis(a,b) = { y : <y, a-b> = 0 }`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geodesic::dist;
use crate::minkowski::mink;
use crate::point::HPoint;
use crate::tol::DESCENT_STALL;

/// A totally geodesic hypersurface `{ x in H^n : <x, w> = 0 }` for a
/// spacelike unit normal `w`.
#[derive(Debug, Clone)]
pub struct Hyperplane {
    normal: DVector<f64>,
}

impl Hyperplane {
    /// From any spacelike vector; the normal is rescaled to `<w,w> = 1`.
    pub fn new(normal: DVector<f64>) -> Result<Self> {
        let n2 = mink(&normal, &normal);
        if n2 <= 0.0 {
            return Err(Error::Degenerate(
                "hyperplane normal must be spacelike".into(),
            ));
        }
        Ok(Hyperplane {
            normal: normal / n2.sqrt(),
        })
    }

    /// Perpendicular bisector of the segment `ab`.
    pub fn bisector(a: &HPoint, b: &HPoint) -> Result<Self> {
        let w = a.coords() - b.coords();
        Hyperplane::new(w).map_err(|_| Error::Degenerate("bisector of coincident points".into()))
    }

    pub fn normal(&self) -> &DVector<f64> {
        &self.normal
    }

    /// Signed offset `<x, w>`; the hyperplane separates the two signs, and
    /// `d(x, H) = asinh(|<x, w>|)`.
    pub fn signed_offset(&self, x: &HPoint) -> f64 {
        mink(x.coords(), &self.normal)
    }

    pub fn distance(&self, x: &HPoint) -> f64 {
        self.signed_offset(x).abs().asinh()
    }

    /// Nearest point of the hyperplane.
    pub fn project(&self, x: &HPoint) -> HPoint {
        let w = x.coords() - &self.normal * self.signed_offset(x);
        HPoint::from_timelike(w).expect("projection of a sheet point stays timelike")
    }
}

/// Distance from `x` to `Bis(a, b)`.
pub fn bisector_distance(x: &HPoint, a: &HPoint, b: &HPoint) -> Result<f64> {
    Ok(Hyperplane::bisector(a, b)?.distance(x))
}

/// Distance between two totally geodesic hyperplanes, computed by
/// alternating nearest-point projection seeded at `seed`. The projections
/// decrease the distance monotonically; iteration stops at a `DESCENT_STALL`
/// stall. Intersecting hyperplanes yield 0.
pub fn hyperplane_distance(h1: &Hyperplane, h2: &Hyperplane, seed: &HPoint) -> f64 {
    let mut p = h1.project(seed);
    let mut q = h2.project(&p);
    let mut d = dist(&p, &q);
    for _ in 0..500 {
        p = h1.project(&q);
        q = h2.project(&p);
        let nd = dist(&p, &q);
        if d - nd < DESCENT_STALL * 1e-3 {
            return nd;
        }
        d = nd;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::dvector;

    fn boost_point(t: f64) -> HPoint {
        HPoint::renormalize(dvector![t.cosh(), t.sinh(), 0.0]).unwrap()
    }

    #[test]
    fn equidistant_point_has_zero_distance() {
        let a = boost_point(1.0);
        let b = boost_point(-1.0);
        let o = HPoint::origin(2);
        assert!(bisector_distance(&o, &a, &b).unwrap() < 1e-12);
    }

    #[test]
    fn endpoints_sit_on_opposite_sides() {
        let a = boost_point(0.8);
        let b = HPoint::renormalize(dvector![0.9_f64.cosh(), 0.0, 0.9_f64.sinh()]).unwrap();
        let h = Hyperplane::bisector(&a, &b).unwrap();
        assert!(h.signed_offset(&a) * h.signed_offset(&b) < 0.0);
    }

    #[test]
    fn distance_from_a_is_half_gap() {
        // d(a, Bis(a,b)) = d(a,b)/2 in constant curvature.
        let a = boost_point(0.3);
        let b = boost_point(1.7);
        let d = bisector_distance(&a, &a, &b).unwrap();
        assert_abs_diff_eq!(d, dist(&a, &b) / 2.0, epsilon = 1e-10);
    }

    #[test]
    fn coincident_points_error() {
        let a = boost_point(0.5);
        assert!(bisector_distance(&a, &a, &a.clone()).is_err());
    }

    #[test]
    fn alternating_projection_matches_closed_form() {
        // Ultraparallel hyperplanes: normals with |<u,v>| > 1 are at distance
        // arccosh(|<u,v>|).
        let u = dvector![0.0, 1.0, 0.0];
        let s: f64 = 1.3;
        let v = dvector![s.sinh(), s.cosh(), 0.0];
        let h1 = Hyperplane::new(u.clone()).unwrap();
        let h2 = Hyperplane::new(v.clone()).unwrap();
        let expected = mink(&h1.normal, &h2.normal).abs().acosh();
        let got = hyperplane_distance(&h1, &h2, &HPoint::origin(2));
        assert_abs_diff_eq!(got, expected, epsilon = 1e-6);
    }
}
