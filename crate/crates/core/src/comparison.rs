//! Comparison triangles/polygons in H^2 and the CAT(-1) inequality battery
//! as checkable predicates.

use crate::error::{Error, Result};
use crate::geodesic::{angle_at, dist, dist_to_geodesic, project_to_geodesic, Endpoint,
    GeodesicSegment};
use crate::isometry::Isometry;
use crate::margulis::MargulisRegion;
use crate::point::HPoint;
use crate::tol::{delta, ANGLE_TOL};

/// A triangle given by its side lengths, realized intrinsically in H^2; the
/// angles come from the hyperbolic law of cosines.
#[derive(Debug, Clone)]
pub struct ComparisonTriangle {
    /// (a, b, c) = lengths of the sides opposite vertices A, B, C.
    pub sides: [f64; 3],
    /// Angles at A, B, C.
    pub angles: [f64; 3],
}

impl ComparisonTriangle {
    pub fn from_sides(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && c > 0.0) {
            return Err(Error::Degenerate("sides must be positive".into()));
        }
        if a > b + c + 1e-12 || b > a + c + 1e-12 || c > a + b + 1e-12 {
            return Err(Error::Degenerate("triangle inequality violated".into()));
        }
        let angle = |opp: f64, s1: f64, s2: f64| -> f64 {
            let cosv = (s1.cosh() * s2.cosh() - opp.cosh()) / (s1.sinh() * s2.sinh());
            cosv.clamp(-1.0, 1.0).acos()
        };
        Ok(ComparisonTriangle {
            sides: [a, b, c],
            angles: [angle(a, b, c), angle(b, c, a), angle(c, a, b)],
        })
    }
}

/// Result of comparing a model triangle with its comparison triangle.
#[derive(Debug, Clone)]
pub struct TriangleComparison {
    pub comparison: ComparisonTriangle,
    /// Angles measured in the model at A, B, C.
    pub model_angles: [f64; 3],
    /// Collinear (needle) triangles are flagged, not rejected.
    pub degenerate: bool,
}

impl TriangleComparison {
    /// The angle-comparison inequality (equality in constant curvature).
    pub fn angles_dominated(&self, tol: f64) -> bool {
        self.model_angles
            .iter()
            .zip(&self.comparison.angles)
            .all(|(m, c)| *m <= *c + tol)
    }
}

/// Build the comparison triangle of [ABC] and report both angle triples.
pub fn compare_triangle(a: &HPoint, b: &HPoint, c: &HPoint) -> Result<TriangleComparison> {
    let da = dist(b, c);
    let db = dist(c, a);
    let dc = dist(a, b);
    if da < 1e-12 || db < 1e-12 || dc < 1e-12 {
        return Err(Error::Degenerate("coincident vertices".into()));
    }
    let comparison = ComparisonTriangle::from_sides(da, db, dc)?;
    let model_angles = [
        angle_at(a, &b.clone().into(), &c.clone().into())?,
        angle_at(b, &c.clone().into(), &a.clone().into())?,
        angle_at(c, &a.clone().into(), &b.clone().into())?,
    ];
    let degenerate = model_angles
        .iter()
        .any(|x| *x < 1e-7 || *x > std::f64::consts::PI - 1e-7);
    Ok(TriangleComparison {
        comparison,
        model_angles,
        degenerate,
    })
}

/// Right-triangle comparison bound: in a triangle whose angle at the third
/// vertex is at least pi/2, the side `a` opposite A and the angle `beta` at B
/// satisfy `cosh(a) sin(beta) <= 1`. The caller asserts the hypothesis; this
/// evaluates the inequality with tolerance 1e-9.
pub fn check_right_triangle_bound(a: f64, beta: f64) -> bool {
    a.cosh() * beta.sin() <= 1.0 + 1e-9
}

/// Report of the quadrilateral comparison bounds.
#[derive(Debug, Clone, PartialEq)]
pub enum QuadReport {
    /// Angle hypotheses at B, C, D hold; carries (bound1 ok, bound2 ok or
    /// n/a when its own precondition fails).
    Checked { bound1: bool, bound2: Option<bool> },
    /// An angle hypothesis fails: a signal, not an inequality failure.
    HypothesisNotMet { vertex: char, angle: f64 },
}

/// Quadrilateral [ABCD] with angles at B, C, D at least pi/2:
/// (1) `sinh d(B,C) sinh d(C,D) <= 1`;
/// (2) when `cosh d(A,B) sin(angle BAD) > 1`, also
///     `cosh d(C,D) >= cosh d(A,B) sin(angle BAD)`.
/// The first vertex may be ideal (the boundary-limit case); bound 2 is then
/// reported n/a.
pub fn check_quadrilateral_bounds(
    a: &Endpoint,
    b: &HPoint,
    c: &HPoint,
    d: &HPoint,
) -> Result<QuadReport> {
    let min_angle = std::f64::consts::FRAC_PI_2 - ANGLE_TOL;
    let ang_b = angle_at(b, a, &c.clone().into())?;
    if ang_b < min_angle {
        return Ok(QuadReport::HypothesisNotMet {
            vertex: 'B',
            angle: ang_b,
        });
    }
    let ang_c = angle_at(c, &b.clone().into(), &d.clone().into())?;
    if ang_c < min_angle {
        return Ok(QuadReport::HypothesisNotMet {
            vertex: 'C',
            angle: ang_c,
        });
    }
    let ang_d = angle_at(d, &c.clone().into(), a)?;
    if ang_d < min_angle {
        return Ok(QuadReport::HypothesisNotMet {
            vertex: 'D',
            angle: ang_d,
        });
    }
    let bound1 = dist(b, c).sinh() * dist(c, d).sinh() <= 1.0 + 1e-9;
    let bound2 = match a {
        Endpoint::Ideal(_) => None,
        Endpoint::Interior(ap) => {
            let alpha = angle_at(ap, &b.clone().into(), &d.clone().into())?;
            let lhs = dist(ap, b).cosh() * alpha.sin();
            if lhs > 1.0 {
                Some(dist(c, d).cosh() >= lhs - 1e-9)
            } else {
                None
            }
        }
    };
    Ok(QuadReport::Checked { bound1, bound2 })
}

/// Fan of comparison triangles sharing the first vertex, realized in H^2.
#[derive(Debug, Clone)]
pub struct ComparisonPolygon {
    pub triangles: Vec<ComparisonTriangle>,
    /// H^2 placements of the vertices (fan construction: consecutive
    /// triangles on opposite sides of the shared diagonal).
    pub embedded: Vec<HPoint>,
}

impl ComparisonPolygon {
    /// Comparison polygon of the chain P_1 ... P_m (vertices in any H^n).
    pub fn new(points: &[HPoint]) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::Degenerate("need at least three vertices".into()));
        }
        let p1 = &points[0];
        let mut triangles = Vec::new();
        for w in points[1..].windows(2) {
            triangles.push(ComparisonTriangle::from_sides(
                dist(&w[0], &w[1]),
                dist(p1, &w[1]),
                dist(p1, &w[0]),
            )?);
        }
        // Embed: P'_1 at the origin, fanning by the apex angles.
        let o = HPoint::origin(2);
        let mut embedded = vec![o.clone()];
        let mut theta = 0.0_f64;
        for (k, tri) in triangles.iter().enumerate() {
            let r = tri.sides[2]; // d(P1, P_k+1)
            if k == 0 {
                embedded.push(polar_point(r, theta)?);
            }
            theta += tri.angles[0];
            embedded.push(polar_point(tri.sides[1], theta)?);
        }
        Ok(ComparisonPolygon {
            triangles,
            embedded,
        })
    }

    /// Edge lengths of the embedded fan (for the gluing consistency check).
    pub fn embedded_side_lengths(&self) -> Vec<f64> {
        self.embedded
            .windows(2)
            .map(|w| dist(&w[0], &w[1]))
            .collect()
    }
}

fn polar_point(r: f64, theta: f64) -> Result<HPoint> {
    HPoint::new(nalgebra::dvector![
        r.cosh(),
        r.sinh() * theta.cos(),
        r.sinh() * theta.sin()
    ])
}

/// Measured nearness of a chord to a polygonal chain: the chord from the
/// first to the last of `m+1` points stays within
/// `lambda = arccosh(sqrt 2) * ceil(log2 m)` of the union of the sides.
/// Returns (measured sup distance over `samples` chord points, lambda).
pub fn polygon_nearness(points: &[HPoint], samples: usize) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::Degenerate("need at least two points".into()));
    }
    let m = (points.len() - 1) as f64;
    let bound = delta() * m.log2().ceil().max(0.0);
    let sides: Vec<GeodesicSegment> = points
        .windows(2)
        .map(|w| GeodesicSegment::between(&w[0], &w[1]))
        .collect::<Result<_>>()?;
    let chord = GeodesicSegment::between(&points[0], &points[points.len() - 1])?;
    let mut worst = 0.0_f64;
    for k in 0..=samples {
        let t = chord.length() * k as f64 / samples as f64;
        let p = chord.eval(t)?;
        let d = sides
            .iter()
            .map(|s| dist_to_geodesic(&p, s))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    Ok((worst, bound))
}

/// Report of the loop-to-axis nearness measurement.
#[derive(Debug, Clone)]
pub struct LoopAxisReport {
    /// Distance from the chord (first to last vertex) to the axis.
    pub chord_axis_distance: f64,
    /// Its bound `asinh(2/eps)` (valid when `l(g) >= eps`).
    pub chord_bound: f64,
    /// Distance from the polygonal path to axis union Margulis region.
    pub path_union_distance: f64,
    /// Its bound `arccosh(sqrt 2) ceil(log2 r) + asinh(2/eps)`.
    pub union_bound: f64,
}

/// For a loxodromic `g` and a polygonal path `v_0 .. v_r` lifting a loop
/// freely homotopic to the core geodesic (so `v_r = g(v_0)`), measure the
/// distance from the chord `v_0 v_r` to the axis and from the whole path to
/// axis-union-Margulis-region, together with their bounds.
pub fn loop_to_axis_bound(
    g: &Isometry,
    vertices: &[HPoint],
    eps: f64,
) -> Result<LoopAxisReport> {
    if !g.classify().is_loxodromic() {
        return Err(Error::Class("loop-to-axis bound needs a loxodromic".into()));
    }
    if eps <= 0.0 {
        return Err(Error::Domain("eps must be positive".into()));
    }
    if g.translation_length() < eps - 1e-9 {
        return Err(Error::Precondition(format!(
            "l(g) = {} below eps = {eps}",
            g.translation_length()
        )));
    }
    if vertices.len() < 2 {
        return Err(Error::Degenerate("need at least two vertices".into()));
    }
    let closed = dist(&g.apply(&vertices[0]), &vertices[vertices.len() - 1]);
    if closed > 1e-6 {
        return Err(Error::Precondition(format!(
            "path does not close up to the deck image (gap {closed:.2e})"
        )));
    }
    let axis = g.axis()?;
    let r = (vertices.len() - 1) as f64;
    let chord_bound = (2.0 / eps).asinh();
    let union_bound = delta() * r.log2().ceil().max(0.0) + chord_bound;

    let chord = GeodesicSegment::between(&vertices[0], &vertices[vertices.len() - 1])?;
    let chord_axis_distance = segment_to_line_distance(&chord, &axis)?;

    // The Margulis region at eps is empty (or degenerates into the axis)
    // when l(g) >= eps, so the union distance reduces to the axis. Sampled
    // at resolution 0.01 along each edge, with per-edge golden-section
    // refinement.
    let region = MargulisRegion::new(g.clone(), eps)?;
    let mut best = f64::INFINITY;
    for w in vertices.windows(2) {
        if dist(&w[0], &w[1]) < 1e-12 {
            continue;
        }
        let seg = GeodesicSegment::between(&w[0], &w[1])?;
        best = best.min(segment_to_line_distance(&seg, &axis)?);
        if !region.is_empty() {
            let steps = (seg.length() / 0.5).ceil() as usize;
            for k in 0..=steps {
                let p = seg.eval(seg.length() * k as f64 / steps as f64)?;
                best = best.min(region.distance_to(&p));
            }
        }
    }
    Ok(LoopAxisReport {
        chord_axis_distance,
        chord_bound,
        path_union_distance: best,
        union_bound,
    })
}

/// Distance from a segment to a complete geodesic by golden-section search
/// (the pointwise distance is convex along the segment).
fn segment_to_line_distance(seg: &GeodesicSegment, line: &GeodesicSegment) -> Result<f64> {
    let f = |t: f64| -> f64 {
        let p = seg.eval(t).expect("segment parameter");
        let (_, d) = project_to_geodesic(&p, line).expect("projection");
        d
    };
    let (mut lo, mut hi) = (0.0, seg.length());
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo < 1e-10 {
            break;
        }
        if f1 > f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
    }
    Ok(f(0.5 * (lo + hi)).min(f(0.0)).min(f(seg.length())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::dvector;

    fn h2(x: f64, y: f64) -> HPoint {
        HPoint::renormalize(dvector![
            (x * x + y * y + 1.0) / (2.0 * y),
            (x * x + y * y - 1.0) / (2.0 * y),
            x / y
        ])
        .unwrap()
    }

    #[test]
    fn equilateral_angles_from_law_of_cosines() {
        let t = ComparisonTriangle::from_sides(1.0, 1.0, 1.0).unwrap();
        let expect = ((1.0_f64.cosh().powi(2) - 1.0_f64.cosh())
            / 1.0_f64.sinh().powi(2))
        .acos();
        for a in t.angles {
            assert_abs_diff_eq!(a, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn model_and_comparison_angles_agree() {
        let a = h2(0.0, 1.0);
        let b = h2(1.5, 0.8);
        let c = h2(-0.4, 2.5);
        let cmp = compare_triangle(&a, &b, &c).unwrap();
        for (m, t) in cmp.model_angles.iter().zip(&cmp.comparison.angles) {
            assert_abs_diff_eq!(*m, *t, epsilon = 1e-8);
        }
        assert!(cmp.angles_dominated(1e-8));
        assert!(!cmp.degenerate);
    }

    #[test]
    fn needle_triangle_flagged_with_straight_angle() {
        let a = h2(0.0, 1.0);
        let b = h2(0.0, 4.0);
        let c = h2(0.0, 2.0); // on the segment ab
        let cmp = compare_triangle(&a, &b, &c).unwrap();
        assert!(cmp.degenerate);
        assert_abs_diff_eq!(cmp.model_angles[2], std::f64::consts::PI, epsilon = 1e-6);
    }

    #[test]
    fn right_triangle_bound_cases() {
        assert!(check_right_triangle_bound(3.0, 0.0));
        // Right triangle with legs 1, 1 at C: cosh a sin beta = cos(angle at
        // the other vertex) <= 1.
        let c = h2(0.0, 1.0);
        let a = h2(0.0, 1.0_f64.exp());
        let b = h2(1.0_f64.tanh(), 1.0 / 1.0_f64.cosh()); // distance 1 from c, orthogonal
        let cmp = compare_triangle(&a, &b, &c).unwrap();
        assert_abs_diff_eq!(
            cmp.model_angles[2],
            std::f64::consts::FRAC_PI_2,
            epsilon = 1e-9
        );
        let side_a = dist(&b, &c);
        assert!(check_right_triangle_bound(side_a, cmp.model_angles[1]));
        assert!(
            side_a.cosh() * cmp.model_angles[1].sin() <= 1.0 + 1e-9
                && side_a.cosh() * cmp.model_angles[1].sin() > 0.5
        );
    }

    #[test]
    fn lambert_quadrilateral_satisfies_bound1() {
        // Perpendiculars erected at distances p, q from a right-angled
        // corner meet iff sinh p sinh q < 1; the resulting Lambert
        // quadrilateral has three right angles.
        let p = 0.6_f64;
        let q = 0.7_f64;
        assert!(p.sinh() * q.sinh() < 1.0);
        let c = HPoint::origin(2);
        let b = HPoint::new(dvector![p.cosh(), p.sinh(), 0.0]).unwrap();
        let d = HPoint::new(dvector![q.cosh(), 0.0, q.sinh()]).unwrap();
        // Fourth vertex: intersection of the two perpendicular hyperplanes,
        // known in closed form for this configuration.
        let (sp, sq) = (p.sinh(), q.sinh());
        let denom = (1.0 - sp * sp * sq * sq).sqrt();
        let a = HPoint::renormalize(dvector![
            (p.cosh() * q.cosh()) / denom,
            (p.sinh() * q.cosh()) / denom,
            (q.sinh() * p.cosh()) / denom
        ])
        .unwrap();
        let report = check_quadrilateral_bounds(&a.into(), &b, &c, &d).unwrap();
        match report {
            QuadReport::Checked { bound1, .. } => assert!(bound1),
            other => panic!("hypotheses should hold, got {other:?}"),
        }
    }

    #[test]
    fn acute_angle_reports_hypothesis_not_met() {
        let b = h2(0.0, 1.0);
        let c = h2(1.0, 1.0);
        let d = h2(1.0, 2.0);
        let a = h2(0.3, 1.8);
        let report = check_quadrilateral_bounds(&a.into(), &b, &c, &d).unwrap();
        assert!(matches!(report, QuadReport::HypothesisNotMet { .. }));
    }

    #[test]
    fn fan_reconstruction_reproduces_side_lengths() {
        let pts = vec![h2(0.0, 1.0), h2(1.0, 1.2), h2(1.8, 2.2), h2(0.6, 3.0)];
        let poly = ComparisonPolygon::new(&pts).unwrap();
        let lengths = poly.embedded_side_lengths();
        for (k, w) in pts.windows(2).enumerate() {
            assert_abs_diff_eq!(lengths[k], dist(&w[0], &w[1]), epsilon = 1e-9);
        }
    }

    #[test]
    fn chord_nearness_single_side_is_zero() {
        let pts = vec![h2(0.0, 1.0), h2(0.0, 3.0)];
        let (measured, bound) = polygon_nearness(&pts, 50).unwrap();
        assert!(measured < 1e-9);
        assert_eq!(bound, 0.0);
    }

    #[test]
    fn chord_nearness_wedge_under_delta() {
        let pts = vec![h2(-1.0, 1.0), h2(0.0, 2.5), h2(1.0, 1.0)];
        let (measured, bound) = polygon_nearness(&pts, 200).unwrap();
        assert_abs_diff_eq!(bound, delta(), epsilon = 1e-12);
        assert!(measured <= bound + 1e-6, "measured {measured} > {bound}");
    }

    #[test]
    fn loop_on_axis_has_zero_distance() {
        let g = Isometry::boost(2, 1, 1.0).unwrap();
        let axis = g.axis().unwrap();
        let v0 = axis.eval(0.0).unwrap();
        let mid = axis.eval(0.5).unwrap();
        let v1 = g.apply(&v0);
        let report = loop_to_axis_bound(&g, &[v0, mid, v1], 0.5).unwrap();
        assert!(report.chord_axis_distance < 1e-9);
        assert!(report.path_union_distance < 1e-9);
        assert!(report.union_bound >= report.chord_bound);
    }

    #[test]
    fn displaced_loop_stays_under_bound() {
        let g = Isometry::boost(2, 1, 1.0).unwrap();
        let eps = 0.5;
        let v0 = h2(0.3, 2.0);
        let v1 = g.apply(&v0);
        let mid_up = h2(0.8, 2.6);
        let report = loop_to_axis_bound(&g, &[v0, mid_up, v1], eps).unwrap();
        assert!(report.chord_axis_distance <= report.chord_bound + 1e-4);
        assert!(report.path_union_distance <= report.union_bound + 1e-4);
    }
}
