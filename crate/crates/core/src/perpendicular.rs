//! Common perpendiculars between disjoint geodesics.

use crate::error::{Error, Result};
use crate::geodesic::GeodesicSegment;
use crate::minkowski::mink;
use crate::tol::FORM_TOL;

/// Ideal endpoints of two complete geodesics coincide?
fn share_ideal_endpoint(g1: &GeodesicSegment, g2: &GeodesicSegment) -> bool {
    let ends1 = [g1.forward_ideal(), g1.backward_ideal()];
    let ends2 = [g2.forward_ideal(), g2.backward_ideal()];
    ends1
        .iter()
        .any(|a| ends2.iter().any(|b| a.spherical_distance(b) < 1e-9))
}

/// The unique segment meeting two disjoint complete geodesics orthogonally.
/// Its length is `d(g1, g2)`. Geodesics sharing an ideal endpoint have no
/// common perpendicular and report an error; intersecting geodesics yield
/// the zero-length segment at the intersection point (returned as an error
/// value distinguishable by the caller via `distance_between_lines`).
///
/// The foot parameters minimize `(t, s) -> cosh d(g1(t), g2(s))`, which
/// expands to `A cosh t cosh s + B cosh t sinh s + C sinh t cosh s +
/// D sinh t sinh s`; the function is convex, and a guarded Newton iteration
/// converges quadratically.
pub fn common_perpendicular(
    g1: &GeodesicSegment,
    g2: &GeodesicSegment,
) -> Result<GeodesicSegment> {
    let (t, s, coshd) = minimize_pair_distance(g1, g2)?;
    if coshd <= 1.0 + FORM_TOL {
        return Err(Error::Degenerate(
            "geodesics intersect: zero-length common perpendicular".into(),
        ));
    }
    let p = g1.eval(t)?;
    let q = g2.eval(s)?;
    GeodesicSegment::between(&p, &q)
}

/// Distance between two complete geodesics (0 when they intersect), plus the
/// realizing parameters.
pub fn distance_between_lines(
    g1: &GeodesicSegment,
    g2: &GeodesicSegment,
) -> Result<(f64, f64, f64)> {
    let (t, s, coshd) = minimize_pair_distance(g1, g2)?;
    Ok((coshd.max(1.0).acosh(), t, s))
}

fn minimize_pair_distance(g1: &GeodesicSegment, g2: &GeodesicSegment) -> Result<(f64, f64, f64)> {
    if share_ideal_endpoint(g1, g2) {
        return Err(Error::NoPerpendicular(
            "geodesics are asymptotic (shared ideal endpoint)".into(),
        ));
    }
    let a = -mink(g1.basepoint().coords(), g2.basepoint().coords());
    let b = -mink(g1.basepoint().coords(), g2.unit_tangent());
    let c = -mink(g1.unit_tangent(), g2.basepoint().coords());
    let d = -mink(g1.unit_tangent(), g2.unit_tangent());

    let f = |t: f64, s: f64| {
        a * t.cosh() * s.cosh() + b * t.cosh() * s.sinh() + c * t.sinh() * s.cosh()
            + d * t.sinh() * s.sinh()
    };

    let mut t = 0.0_f64;
    let mut s = 0.0_f64;
    let mut val = f(t, s);
    for _ in 0..200 {
        let ft = a * t.sinh() * s.cosh() + b * t.sinh() * s.sinh() + c * t.cosh() * s.cosh()
            + d * t.cosh() * s.sinh();
        let fs = a * t.cosh() * s.sinh() + b * t.cosh() * s.cosh() + c * t.sinh() * s.sinh()
            + d * t.sinh() * s.cosh();
        let ftt = val;
        let fss = val;
        let fts = a * t.sinh() * s.sinh() + b * t.sinh() * s.cosh() + c * t.cosh() * s.sinh()
            + d * t.cosh() * s.cosh();
        let det = ftt * fss - fts * fts;
        let (mut dt, mut ds) = if det.abs() > 1e-14 {
            ((-ft * fss + fs * fts) / det, (-fs * ftt + ft * fts) / det)
        } else {
            (-ft, -fs)
        };
        // Guard the step length; far seeds can overshoot before the basin.
        let step = (dt * dt + ds * ds).sqrt();
        if step > 2.0 {
            dt *= 2.0 / step;
            ds *= 2.0 / step;
        }
        // Backtracking line search on the convex objective.
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let cand = f(t + lambda * dt, s + lambda * ds);
            if cand < val {
                t += lambda * dt;
                s += lambda * ds;
                val = cand;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved || (ft.abs() < 1e-13 && fs.abs() < 1e-13) {
            break;
        }
        if !t.is_finite() || !s.is_finite() || t.abs() > 700.0 || s.abs() > 700.0 {
            return Err(Error::NoPerpendicular(
                "minimizing parameters diverged (asymptotic or ill-posed pair)".into(),
            ));
        }
    }
    Ok((t, s, val))
}
