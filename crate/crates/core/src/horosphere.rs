//! Busemann functions, horoballs and the exponential decay of asymptotic
//! rays.

use crate::error::{Error, Result};
use crate::geodesic::{dist, GeodesicSegment};
use crate::minkowski::mink;
use crate::point::{HPoint, IdealPoint};

/// Busemann function of `xi`, normalized to vanish at `basepoint`:
/// `B_xi(x) = log(<x, xi> / <basepoint, xi>)` (inner products are negative).
/// Level sets are horospheres about `xi`; the value decreases at unit speed
/// along rays toward `xi`.
pub fn busemann(xi: &IdealPoint, x: &HPoint, basepoint: &HPoint) -> f64 {
    let num = -mink(x.coords(), xi.coords());
    let den = -mink(basepoint.coords(), xi.coords());
    (num / den).ln()
}

/// Busemann value against the model origin; the normalization used by
/// [`Horoball`] levels.
pub fn busemann_origin(xi: &IdealPoint, x: &HPoint) -> f64 {
    let o = HPoint::origin(x.dim());
    busemann(xi, x, &o)
}

/// A closed horoball `{ x : B_xi(x) <= level }` (Busemann normalized at the
/// model origin).
#[derive(Debug, Clone)]
pub struct Horoball {
    pub center: IdealPoint,
    pub level: f64,
}

impl Horoball {
    pub fn new(center: IdealPoint, level: f64) -> Self {
        Horoball { center, level }
    }

    pub fn contains(&self, x: &HPoint) -> bool {
        busemann_origin(&self.center, x) <= self.level + crate::tol::FORM_TOL
    }

    /// Distance from `x` to the horoball: the Busemann excess, zero inside.
    pub fn distance(&self, x: &HPoint) -> f64 {
        (busemann_origin(&self.center, x) - self.level).max(0.0)
    }

    /// Nearest point: flow along the ray toward the center by the excess.
    pub fn project(&self, x: &HPoint) -> Result<HPoint> {
        let excess = busemann_origin(&self.center, x) - self.level;
        if excess <= 0.0 {
            return Ok(x.clone());
        }
        let ray = GeodesicSegment::ray(x, &self.center)?;
        ray.point_at(excess)
    }
}

/// Distances between asymptotic rays. Both rays run toward `xi` at unit
/// speed, starting at `y` and `z`; returns the measured `d(rho_y(t),
/// rho_z(t))` together with the bound `R e^{-t}`, where `R = 2 sinh(d(y,z)/2)`
/// is the constant-curvature decay coefficient for points on a common
/// horosphere (for such points the distance is exactly
/// `2 asinh(e^{-t} sinh(d(y,z)/2))`).
pub fn ray_decay(xi: &IdealPoint, y: &HPoint, z: &HPoint, t: f64) -> Result<(f64, f64)> {
    if t < 0.0 {
        return Err(Error::Domain("ray parameter must be nonnegative".into()));
    }
    let d0 = dist(y, z);
    let bound = 2.0 * (d0 / 2.0).sinh() * (-t).exp();
    if d0 == 0.0 {
        return Ok((0.0, bound));
    }
    let ry = GeodesicSegment::ray(y, xi)?.point_at(t)?;
    let rz = GeodesicSegment::ray(z, xi)?.point_at(t)?;
    Ok((dist(&ry, &rz), bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::dvector;

    #[test]
    fn busemann_normalization_and_unit_decay() {
        let o = HPoint::origin(2);
        let xi = IdealPoint::from_null(dvector![1.0, 1.0, 0.0]).unwrap();
        assert_eq!(busemann(&xi, &o, &o), 0.0);
        let ray = GeodesicSegment::ray(&o, &xi).unwrap();
        let p = ray.point_at(2.5).unwrap();
        assert_abs_diff_eq!(busemann(&xi, &p, &o), -2.5, epsilon = 1e-12);
    }

    #[test]
    fn ray_decay_trivial_and_monotone() {
        let xi = IdealPoint::from_null(dvector![1.0, 0.0, 1.0]).unwrap();
        let y = HPoint::origin(2);
        let (d, bound) = ray_decay(&xi, &y, &y, 1.0).unwrap();
        assert_eq!(d, 0.0);
        assert!(bound > 0.0 || bound == 0.0);
        assert!(ray_decay(&xi, &y, &y, -0.1).is_err());
    }

    #[test]
    fn horoball_membership_matches_busemann() {
        let xi = IdealPoint::from_null(dvector![1.0, 1.0, 0.0]).unwrap();
        let ball = Horoball::new(xi.clone(), -1.0);
        let o = HPoint::origin(2);
        assert!(!ball.contains(&o));
        let inside = GeodesicSegment::ray(&o, &xi).unwrap().point_at(1.5).unwrap();
        assert!(ball.contains(&inside));
        // Projection lands on the boundary horosphere.
        let p = ball.project(&o).unwrap();
        assert_abs_diff_eq!(busemann_origin(&xi, &p), -1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(ball.distance(&o), 1.0, epsilon = 1e-12);
    }
}
