//! Margulis regions `Mar(g, eps) = { x : d(x, g x) <= eps }` (convex), thin
//! parts of cyclic groups, and the large-displacement power search.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geodesic::{dist, GeodesicSegment};
use crate::isometry::{Classification, Isometry};
use crate::minkowski::{mink, tangent_part};
use crate::point::HPoint;
use crate::tol::{DESCENT_STALL, FORM_TOL};

/// Margulis region of a single isometry.
#[derive(Debug, Clone)]
pub struct MargulisRegion {
    pub generator: Isometry,
    pub epsilon: f64,
}

impl MargulisRegion {
    pub fn new(generator: Isometry, epsilon: f64) -> Result<Self> {
        if epsilon <= 0.0 {
            return Err(Error::Domain("epsilon must be positive".into()));
        }
        Ok(MargulisRegion { generator, epsilon })
    }

    /// Definitional membership, exact up to the distance tolerance.
    pub fn contains(&self, x: &HPoint) -> bool {
        self.generator.displacement(x) <= self.epsilon + FORM_TOL
    }

    /// Empty iff the generator is loxodromic with translation length above
    /// epsilon (the displacement infimum is then not attained below it).
    pub fn is_empty(&self) -> bool {
        self.generator.translation_length() > self.epsilon
    }

    /// A point well inside the region: on the axis for loxodromic, the fixed
    /// point for elliptic, deep inside the cusp for parabolic.
    pub fn anchor(&self) -> Result<HPoint> {
        match self.generator.classify() {
            Classification::Identity => Ok(HPoint::origin(self.generator.dim())),
            Classification::Elliptic { fixed } => Ok(fixed.clone()),
            Classification::Loxodromic { .. } => {
                if self.is_empty() {
                    return Err(Error::EmptyRegion(format!(
                        "loxodromic with l(g) = {} > eps = {}",
                        self.generator.translation_length(),
                        self.epsilon
                    )));
                }
                let axis = self.generator.axis()?;
                Ok(axis.eval(0.0)?)
            }
            Classification::Parabolic { fixed } => {
                // Walk toward the fixed point until the displacement drops
                // well below epsilon.
                let mut x = HPoint::origin(self.generator.dim());
                let target = 0.25 * self.epsilon;
                for _ in 0..200 {
                    if self.generator.displacement(&x) <= target {
                        return Ok(x);
                    }
                    let ray = GeodesicSegment::ray(&x, fixed)?;
                    x = ray.point_at(1.0)?;
                }
                Err(Error::Model("parabolic displacement did not decay".into()))
            }
        }
    }

    /// Nearest point of the region (the projection onto a convex set),
    /// computed by a feasible-descent loop: seed on the boundary along the
    /// geodesic toward the anchor, then slide along the boundary while the
    /// distance to `x` decreases.
    pub fn project(&self, x: &HPoint) -> Result<HPoint> {
        if self.contains(x) {
            return Ok(x.clone());
        }
        let anchor = self.anchor()?;
        let mut p = self.boundary_toward(x, &anchor)?;
        let mut d = dist(x, &p);
        let mut step = (d * 0.5).min(1.0);
        for _ in 0..300 {
            let mut improved = false;
            let mut s = step;
            for _ in 0..25 {
                // Move toward x, then restore feasibility toward the anchor.
                let towards = direction_step(&p, x, s)?;
                let cand = if self.contains(&towards) {
                    towards
                } else {
                    self.boundary_toward(&towards, &anchor)?
                };
                let nd = dist(x, &cand);
                if nd < d - 1e-14 {
                    p = cand;
                    d = nd;
                    improved = true;
                    step = (s * 1.5).min(1.0);
                    break;
                }
                s *= 0.5;
            }
            if !improved || step < DESCENT_STALL * 1e-3 {
                break;
            }
        }
        Ok(p)
    }

    /// Distance to the region (0 inside, +infinity when empty).
    pub fn distance_to(&self, x: &HPoint) -> f64 {
        if self.is_empty() {
            return f64::INFINITY;
        }
        if self.contains(x) {
            return 0.0;
        }
        match self.project(x) {
            Ok(p) => dist(x, &p),
            Err(_) => f64::INFINITY,
        }
    }

    /// First boundary crossing on the geodesic from `from` (outside) to
    /// `inside`, by bisection on the displacement.
    fn boundary_toward(&self, from: &HPoint, inside: &HPoint) -> Result<HPoint> {
        if self.contains(from) {
            return Ok(from.clone());
        }
        let g = GeodesicSegment::between(from, inside)?;
        let mut lo = 0.0;
        let mut hi = g.length();
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let p = g.eval(mid)?;
            if self.contains(&p) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        g.eval(hi)
    }
}

fn direction_step(p: &HPoint, toward: &HPoint, s: f64) -> Result<HPoint> {
    let d = dist(p, toward);
    if d < 1e-15 {
        return Ok(p.clone());
    }
    let v = tangent_part(toward.coords(), p.coords());
    let vn = mink(&v, &v).sqrt();
    let u: DVector<f64> = &v / vn;
    HPoint::from_timelike(p.coords() * s.min(d).cosh() + u * s.min(d).sinh())
}

/// Distance between two Margulis regions by alternating projection
/// (monotone by convexity; stops at a stall of `DESCENT_STALL`). Returns
/// +infinity when either region is empty.
pub fn margulis_distance(m1: &MargulisRegion, m2: &MargulisRegion) -> f64 {
    if m1.is_empty() || m2.is_empty() {
        return f64::INFINITY;
    }
    let Ok(mut p) = m1.anchor() else {
        return f64::INFINITY;
    };
    let mut d_prev = f64::INFINITY;
    for _ in 0..400 {
        let Ok(q) = m2.project(&p) else {
            return f64::INFINITY;
        };
        let Ok(p2) = m1.project(&q) else {
            return f64::INFINITY;
        };
        let d = dist(&p2, &q);
        p = p2;
        if d_prev - d < DESCENT_STALL {
            return d;
        }
        d_prev = d;
    }
    d_prev
}

/// Finite-power surrogate for the thin part `T_eps` of the cyclic group
/// generated by a parabolic or loxodromic isometry: membership means some
/// power `0 < |k| <= power_cap` displaces `x` by at most eps. Since
/// `d(x, g^k x) = d(x, g^-k x)`, only positive powers are tested.
#[derive(Debug, Clone)]
pub struct ThinSet {
    pub generator: Isometry,
    pub epsilon: f64,
    pub power_cap: u32,
}

impl ThinSet {
    pub fn new(generator: Isometry, epsilon: f64, power_cap: u32) -> Result<Self> {
        if epsilon <= 0.0 || power_cap == 0 {
            return Err(Error::Domain("epsilon and power_cap must be positive".into()));
        }
        match generator.classify() {
            Classification::Parabolic { .. } | Classification::Loxodromic { .. } => {}
            c => {
                return Err(Error::Class(format!(
                    "thin sets require a parabolic or loxodromic generator, got {}",
                    c.name()
                )))
            }
        }
        Ok(ThinSet {
            generator,
            epsilon,
            power_cap,
        })
    }

    pub fn contains(&self, x: &HPoint) -> bool {
        let mut pw = self.generator.clone();
        for _ in 0..self.power_cap {
            if dist(x, &pw.apply(x)) <= self.epsilon + FORM_TOL {
                return true;
            }
            pw = pw.compose(&self.generator);
        }
        false
    }

    /// The per-power Margulis regions whose union makes up the surrogate,
    /// restricted to the nonempty ones among powers `1..=cap`.
    pub fn component_regions(&self, cap: u32) -> Vec<MargulisRegion> {
        let mut out = Vec::new();
        let mut pw = self.generator.clone();
        for _ in 0..cap.min(self.power_cap) {
            if let Ok(r) = MargulisRegion::new(pw.clone(), self.epsilon) {
                if !r.is_empty() {
                    out.push(r);
                }
            }
            pw = pw.compose(&self.generator);
        }
        out
    }

    /// Distance from a point to the thin set: the minimum over the component
    /// regions (powers up to `pair_cap`).
    pub fn distance_to(&self, x: &HPoint, pair_cap: u32) -> f64 {
        self.component_regions(pair_cap)
            .iter()
            .map(|r| r.distance_to(x))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Distance between two thin sets: the minimum over component-region pairs
/// (powers up to `pair_cap` on each side).
pub fn thin_set_distance(a: &ThinSet, b: &ThinSet, pair_cap: u32) -> f64 {
    let ra = a.component_regions(pair_cap);
    let rb = b.component_regions(pair_cap);
    let mut best = f64::INFINITY;
    for x in &ra {
        for y in &rb {
            let d = margulis_distance(x, y);
            if d < best {
                best = d;
            }
        }
    }
    best
}

/// Least positive power `i` with `d(x, g^i x) >= target`. Requires `x`
/// outside the interior of the thin set (all powers up to `power_cap`
/// displace by at least eps); the result is checked against the packing
/// bound `N(eps, n, kappa, target)`, whose violation would contradict a
/// theorem and is reported as a model error.
pub fn large_displacement_power(
    g: &Isometry,
    x: &HPoint,
    eps: f64,
    target: f64,
    power_cap: u32,
    bounds: &crate::bounds::BoundFormulas,
) -> Result<u32> {
    let mut pw = g.clone();
    for k in 1..=power_cap {
        if pw.displacement(x) < eps - FORM_TOL {
            return Err(Error::Precondition(format!(
                "power {k} displaces below eps: x is inside the thin part"
            )));
        }
        pw = pw.compose(g);
    }
    let n_bound = bounds.displacement_power_bound(eps, target)?;
    let mut pw = g.clone();
    let hard_cap = (n_bound.ceil() as u64).min(10_000_000) as u32;
    for i in 1..=hard_cap.max(1) {
        if pw.displacement(x) >= target - FORM_TOL {
            return Ok(i);
        }
        pw = pw.compose(g);
    }
    Err(Error::Model(format!(
        "no power up to N = {n_bound:.1} reached displacement {target}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::BoundFormulas;
    use approx::assert_abs_diff_eq;

    fn parabolic_shift() -> Isometry {
        Isometry::from_sl2r(1.0, 1.0, 0.0, 1.0).unwrap()
    }

    /// Half-plane point x + iy on the hyperboloid.
    fn hp(x: f64, y: f64) -> HPoint {
        HPoint::renormalize(nalgebra::dvector![
            (x * x + y * y + 1.0) / (2.0 * y),
            (x * x + y * y - 1.0) / (2.0 * y),
            x / y
        ])
        .unwrap()
    }

    #[test]
    fn parabolic_region_is_horoball_at_expected_height() {
        // z -> z+1: displacement at height y is 2 asinh(1/(2y)), so the
        // region at eps is { y >= 1/(2 sinh(eps/2)) }.
        let eps = 0.5;
        let region = MargulisRegion::new(parabolic_shift(), eps).unwrap();
        let y_crit = 1.0 / (2.0 * (eps / 2.0).sinh());
        assert!(region.contains(&hp(0.3, y_crit * (1.0 + 1e-6))));
        assert!(!region.contains(&hp(0.3, y_crit * (1.0 - 1e-3))));
        // Boundary point is a member within tolerance.
        let boundary = hp(0.0, y_crit);
        assert!(region.generator.displacement(&boundary) <= eps + 1e-9);
    }

    #[test]
    fn loxodromic_region_empty_iff_translation_exceeds_eps() {
        let g = Isometry::boost(2, 1, 1.0).unwrap();
        assert!(MargulisRegion::new(g.clone(), 0.5).unwrap().is_empty());
        let tube = MargulisRegion::new(g, 1.5).unwrap();
        assert!(!tube.is_empty());
        assert!(tube.contains(&HPoint::origin(2)));
        assert_eq!(
            MargulisRegion::new(Isometry::boost(2, 1, 1.0).unwrap(), 0.5)
                .unwrap()
                .distance_to(&HPoint::origin(2)),
            f64::INFINITY
        );
    }

    #[test]
    fn projection_reaches_horoball_boundary() {
        let eps = 0.5;
        let region = MargulisRegion::new(parabolic_shift(), eps).unwrap();
        let y_crit = 1.0 / (2.0 * (eps / 2.0).sinh());
        let x = hp(0.0, y_crit / 4.0);
        let p = region.project(&x).unwrap();
        // Nearest point is straight up: distance log(y_crit / y).
        assert_abs_diff_eq!(dist(&x, &p), (4.0_f64).ln(), epsilon = 1e-4);
    }

    #[test]
    fn region_distance_matches_half_plane_closed_form() {
        // Parabolics fixing infinity and zero: horoball heights give
        // distance ln(|c1 c2| / (4 sinh^2(eps/2))).
        let eps = 0.5;
        let c1 = 3.0;
        let c2 = 3.0;
        let g1 = Isometry::from_sl2r(1.0, c1, 0.0, 1.0).unwrap();
        let g2 = Isometry::from_sl2r(1.0, 0.0, c2, 1.0).unwrap();
        let m1 = MargulisRegion::new(g1, eps).unwrap();
        let m2 = MargulisRegion::new(g2, eps).unwrap();
        let expected = (c1 * c2 / (4.0 * (eps / 2.0).sinh().powi(2))).ln();
        let measured = margulis_distance(&m1, &m2);
        assert_abs_diff_eq!(measured, expected, epsilon = 1e-4);
    }

    #[test]
    fn convexity_of_region_midpoints() {
        let region = MargulisRegion::new(parabolic_shift(), 0.7).unwrap();
        let a = hp(-2.0, 6.0);
        let b = hp(3.0, 9.0);
        assert!(region.contains(&a) && region.contains(&b));
        let g = GeodesicSegment::between(&a, &b).unwrap();
        let mid = g.eval(g.length() / 2.0).unwrap();
        assert!(region.contains(&mid));
    }

    #[test]
    fn thin_set_requires_nonelliptic_generator() {
        let rot = Isometry::rotation(2, 1, 2, 0.3).unwrap();
        assert!(ThinSet::new(rot, 0.5, 8).is_err());
    }

    #[test]
    fn large_displacement_power_on_parabolic() {
        // z -> z+1 at x = i: displacement of g^i is 2 asinh(i/2); the least
        // i with 2 asinh(i/2) >= 5 is 13.
        let g = parabolic_shift();
        let x = hp(0.0, 1.0);
        let b = BoundFormulas::standard(2).unwrap();
        let eps = 2.0 * 0.5_f64.asinh(); // boundary-critical at x
        let i = large_displacement_power(&g, &x, eps, 5.0, 32, &b).unwrap();
        assert_eq!(i, 13);
        // Oracle check by direct iteration.
        let direct = (1..100)
            .find(|k| 2.0 * ((*k as f64) / 2.0).asinh() >= 5.0)
            .unwrap();
        assert_eq!(direct, 13);
        // D = 0 is reached by the first power.
        assert_eq!(large_displacement_power(&g, &x, eps, 0.0, 32, &b).unwrap(), 1);
    }

    #[test]
    fn large_displacement_power_on_axis() {
        // Loxodromic with l = 1, x on the axis: displacement of g^i is i.
        let g = Isometry::boost(2, 1, 1.0).unwrap();
        let x = HPoint::origin(2);
        let b = BoundFormulas::standard(2).unwrap();
        let i = large_displacement_power(&g, &x, 0.9, 7.0, 16, &b).unwrap();
        assert_eq!(i, 7);
    }

    #[test]
    fn inside_thin_part_is_a_precondition_error() {
        let g = parabolic_shift();
        let x = hp(0.0, 50.0); // deep in the cusp
        let b = BoundFormulas::standard(2).unwrap();
        assert!(matches!(
            large_displacement_power(&g, &x, 0.5, 3.0, 8, &b),
            Err(Error::Precondition(_))
        ));
    }
}
