//! Convex bodies with a common distance/projection oracle: metric balls,
//! horoballs, tubes around geodesics and Margulis regions.

use crate::error::{Error, Result};
use crate::geodesic::{dist, project_to_geodesic, GeodesicSegment};
use crate::horosphere::Horoball;
use crate::margulis::{margulis_distance, MargulisRegion};
use crate::point::HPoint;
use crate::tol::DESCENT_STALL;

#[derive(Debug, Clone)]
pub enum ConvexBody {
    Ball { center: HPoint, radius: f64 },
    Horoball(Horoball),
    /// Closed radius-neighborhood of a complete geodesic.
    Tube { axis: GeodesicSegment, radius: f64 },
    Margulis(MargulisRegion),
}

impl ConvexBody {
    pub fn ball(center: HPoint, radius: f64) -> Result<Self> {
        if radius < 0.0 {
            return Err(Error::Domain("ball radius must be nonnegative".into()));
        }
        Ok(ConvexBody::Ball { center, radius })
    }

    pub fn tube(axis: GeodesicSegment, radius: f64) -> Result<Self> {
        if radius < 0.0 {
            return Err(Error::Domain("tube radius must be nonnegative".into()));
        }
        Ok(ConvexBody::Tube {
            axis: axis.extended(),
            radius,
        })
    }

    /// Distance from a point to the body (0 inside).
    pub fn distance_to(&self, x: &HPoint) -> f64 {
        match self {
            ConvexBody::Ball { center, radius } => (dist(x, center) - radius).max(0.0),
            ConvexBody::Horoball(h) => h.distance(x),
            ConvexBody::Tube { axis, radius } => {
                let (_, d) = project_to_geodesic(x, axis).expect("projection onto complete axis");
                (d - radius).max(0.0)
            }
            ConvexBody::Margulis(m) => m.distance_to(x),
        }
    }

    /// Nearest point of the body.
    pub fn project(&self, x: &HPoint) -> Result<HPoint> {
        match self {
            ConvexBody::Ball { center, radius } => {
                let d = dist(x, center);
                if d <= *radius {
                    return Ok(x.clone());
                }
                let g = GeodesicSegment::between(center, x)?;
                g.eval(*radius)
            }
            ConvexBody::Horoball(h) => h.project(x),
            ConvexBody::Tube { axis, radius } => {
                let (foot, d) = project_to_geodesic(x, axis)?;
                if d <= *radius {
                    return Ok(x.clone());
                }
                let g = GeodesicSegment::between(&foot, x)?;
                g.eval(*radius)
            }
            ConvexBody::Margulis(m) => m.project(x),
        }
    }

    /// Some interior point (used to seed descents).
    pub fn witness(&self) -> Result<HPoint> {
        match self {
            ConvexBody::Ball { center, .. } => Ok(center.clone()),
            ConvexBody::Horoball(h) => {
                let o = HPoint::origin(h.center.dim());
                h.project(&o)
            }
            ConvexBody::Tube { axis, .. } => axis.eval(0.0),
            ConvexBody::Margulis(m) => m.anchor(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Ball { center, .. } => center.dim(),
            ConvexBody::Horoball(h) => h.center.dim(),
            ConvexBody::Tube { axis, .. } => axis.dim(),
            ConvexBody::Margulis(m) => m.generator.dim(),
        }
    }
}

/// Distance between two convex bodies by alternating projection; 0 when they
/// intersect. Margulis pairs get their dedicated routine.
pub fn body_distance(a: &ConvexBody, b: &ConvexBody) -> f64 {
    if let (ConvexBody::Margulis(m1), ConvexBody::Margulis(m2)) = (a, b) {
        return margulis_distance(m1, m2);
    }
    let Ok(mut p) = a.witness() else {
        return f64::INFINITY;
    };
    let mut prev = f64::INFINITY;
    for _ in 0..300 {
        let Ok(q) = b.project(&p) else {
            return f64::INFINITY;
        };
        let Ok(p2) = a.project(&q) else {
            return f64::INFINITY;
        };
        let d = dist(&p2, &q);
        p = p2;
        if prev - d < DESCENT_STALL * 1e-2 {
            return d;
        }
        prev = d;
    }
    prev
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::IdealPoint;
    use approx::assert_abs_diff_eq;
    use nalgebra::dvector;

    fn boost_point(t: f64) -> HPoint {
        HPoint::renormalize(dvector![t.cosh(), t.sinh(), 0.0]).unwrap()
    }

    #[test]
    fn ball_distance_and_projection() {
        let b = ConvexBody::ball(HPoint::origin(2), 1.0).unwrap();
        let x = boost_point(3.0);
        assert_abs_diff_eq!(b.distance_to(&x), 2.0, epsilon = 1e-12);
        let p = b.project(&x).unwrap();
        assert_abs_diff_eq!(dist(&p, &HPoint::origin(2)), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn disjoint_balls_distance() {
        let a = ConvexBody::ball(boost_point(-2.0), 0.5).unwrap();
        let b = ConvexBody::ball(boost_point(2.0), 1.0).unwrap();
        assert_abs_diff_eq!(body_distance(&a, &b), 4.0 - 1.5, epsilon = 1e-6);
    }

    #[test]
    fn ball_horoball_distance() {
        let xi = IdealPoint::from_null(dvector![1.0, 1.0, 0.0]).unwrap();
        let h = ConvexBody::Horoball(Horoball::new(xi, -2.0));
        let b = ConvexBody::ball(HPoint::origin(2), 0.5).unwrap();
        // Busemann of the ball's closest point along the ray is -0.5.
        assert_abs_diff_eq!(body_distance(&h, &b), 1.5, epsilon = 1e-6);
    }

    #[test]
    fn tube_contains_its_axis() {
        let axis = GeodesicSegment::between(&HPoint::origin(2), &boost_point(1.0)).unwrap();
        let t = ConvexBody::tube(axis, 0.3).unwrap();
        assert_eq!(t.distance_to(&boost_point(5.0)), 0.0);
        let off = HPoint::renormalize(dvector![1.0_f64.cosh(), 0.0, 1.0_f64.sinh()]).unwrap();
        assert_abs_diff_eq!(t.distance_to(&off), 0.7, epsilon = 1e-10);
    }
}
