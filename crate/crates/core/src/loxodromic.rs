//! Producing and certifying loxodromic elements: the product criterion for
//! distant parabolics, breadth-first bounded-length word search, distant-pair
//! selection among thin sets, and coarse Helly centers.

use serde::Serialize;

use crate::body::{body_distance, ConvexBody};
use crate::error::{Error, Result};
use crate::geodesic::{dist, GeodesicSegment};
use crate::isometry::{Classification, Isometry};
use crate::margulis::{margulis_distance, thin_set_distance, MargulisRegion, ThinSet};
use crate::minkowski::{mink, tangent_part};
use crate::point::HPoint;
use crate::quasigeodesic::mixed_edge_threshold;
use crate::tol::{delta, LOX_WORD_TOL};

/// A word in the generators with its evaluated isometry.
#[derive(Debug, Clone)]
pub struct LoxWord {
    /// (generator index, exponent) with adjacent-inverse runs compressed.
    pub letters: Vec<(usize, i32)>,
    pub evaluation: Isometry,
}

impl LoxWord {
    /// Word length: the sum of the exponent magnitudes.
    pub fn length(&self) -> u32 {
        self.letters.iter().map(|(_, e)| e.unsigned_abs()).sum()
    }

    pub fn display(&self) -> String {
        if self.letters.is_empty() {
            return "1".into();
        }
        self.letters
            .iter()
            .map(|(g, e)| {
                if *e == 1 {
                    format!("g{}", g + 1)
                } else {
                    format!("g{}^{}", g + 1, e)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Search restriction for [`find_lox_word`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Reduced words of the free group, breadth-first by length, letters
    /// ordered by generator index then exponent sign.
    Free,
    /// Two-generator products `g1^k1 g2^k2` with positive exponents,
    /// ordered by total length.
    Powers,
}

/// Breadth-first search for a loxodromic word in the given generators, up to
/// `max_len` letters. Words whose translation length lands in
/// `(0, LOX_WORD_TOL)` are indeterminate and skipped, never returned.
pub fn find_lox_word(
    generators: &[Isometry],
    max_len: u32,
    mode: SearchMode,
) -> Result<LoxWord> {
    if generators.is_empty() {
        return Err(Error::Domain("no generators".into()));
    }
    match mode {
        SearchMode::Free => find_free(generators, max_len),
        SearchMode::Powers => find_powers(generators, max_len),
    }
}

fn is_usable_loxodromic(g: &Isometry) -> bool {
    g.classify().is_loxodromic() && g.translation_length() >= LOX_WORD_TOL
}

fn find_free(generators: &[Isometry], max_len: u32) -> Result<LoxWord> {
    // Letters in deterministic order: g1, g1^-1, g2, g2^-1, ...
    let mut alphabet = Vec::new();
    for (i, g) in generators.iter().enumerate() {
        alphabet.push((i, 1i32, g.clone()));
        alphabet.push((i, -1i32, g.inverse()));
    }
    // Frontier of reduced words of the current length.
    let mut frontier: Vec<(Vec<(usize, i32)>, Isometry)> =
        vec![(Vec::new(), Isometry::identity(generators[0].dim()))];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (word, eval) in &frontier {
            for (gi, sign, mat) in &alphabet {
                if let Some((lg, ls)) = word.last() {
                    if lg == gi && ls.signum() != *sign {
                        continue; // adjacent inverse cancellation
                    }
                }
                let mut w = word.clone();
                match w.last_mut() {
                    Some((lg, le)) if lg == gi && le.signum() == *sign => *le += sign,
                    _ => w.push((*gi, *sign)),
                }
                let ev = eval.compose(mat);
                if is_usable_loxodromic(&ev) {
                    return Ok(LoxWord {
                        letters: w,
                        evaluation: ev,
                    });
                }
                next.push((w, ev));
            }
        }
        frontier = next;
    }
    Err(Error::NotFound(format!(
        "no loxodromic word of length <= {max_len}"
    )))
}

fn find_powers(generators: &[Isometry], max_len: u32) -> Result<LoxWord> {
    if generators.len() != 2 {
        return Err(Error::Domain(
            "power-restricted search needs exactly two generators".into(),
        ));
    }
    for total in 2..=max_len {
        for k1 in 1..total {
            let k2 = total - k1;
            let ev = generators[0]
                .pow(k1 as i64)
                .compose(&generators[1].pow(k2 as i64));
            if is_usable_loxodromic(&ev) {
                return Ok(LoxWord {
                    letters: vec![(0, k1 as i32), (1, k2 as i32)],
                    evaluation: ev,
                });
            }
        }
    }
    Err(Error::NotFound(format!(
        "no loxodromic power product of length <= {max_len}"
    )))
}

/// Verdict of the parabolic-product criterion.
#[derive(Debug, Clone, Serialize)]
pub struct ProductCheck {
    /// d(Mar(g1, eps), Mar(g2, eps)).
    pub region_distance: f64,
    /// The threshold L = mixed-edge threshold at theta = pi/2.
    pub threshold: f64,
    pub hypothesis_met: bool,
    /// Classification name of g2 g1.
    pub product_class: String,
    pub product_translation_length: f64,
    /// region_distance - threshold.
    pub margin: f64,
}

/// For parabolic `g1, g2` with distinct fixed points: when the Margulis
/// regions at `eps` are more than `L(pi/2, eps)` apart the product `g2 g1`
/// is loxodromic. Always reports the actual classification and the margin.
pub fn lox_product_check(g1: &Isometry, g2: &Isometry, eps: f64) -> Result<ProductCheck> {
    let (f1, f2) = match (g1.classify(), g2.classify()) {
        (Classification::Parabolic { fixed: a }, Classification::Parabolic { fixed: b }) => (a, b),
        (a, b) => {
            return Err(Error::Class(format!(
                "product check needs two parabolics, got {} and {}",
                a.name(),
                b.name()
            )))
        }
    };
    if f1.spherical_distance(f2) < 1e-9 {
        return Err(Error::Precondition(
            "parabolic pair shares its fixed point (elementary pair)".into(),
        ));
    }
    let m1 = MargulisRegion::new(g1.clone(), eps)?;
    let m2 = MargulisRegion::new(g2.clone(), eps)?;
    let region_distance = margulis_distance(&m1, &m2);
    let threshold = mixed_edge_threshold(std::f64::consts::FRAC_PI_2, eps)?;
    let product = g2.compose(g1);
    let class = product.classify().clone();
    let hypothesis_met = region_distance > threshold;
    if hypothesis_met && !class.is_loxodromic() {
        return Err(Error::Model(format!(
            "distant Margulis regions (d = {region_distance:.3}) but product is {}",
            class.name()
        )));
    }
    Ok(ProductCheck {
        region_distance,
        threshold,
        hypothesis_met,
        product_class: class.name().into(),
        product_translation_length: product.translation_length(),
        margin: region_distance - threshold,
    })
}

/// Minimize `x -> max_i d(x, B_i)` over pairwise-intersecting convex bodies
/// by subgradient descent seeded at the Karcher-style mean of per-body
/// witness points. Returns the minimizer and its value; for an
/// n-dimensional family the value is at most `n * delta()`.
pub fn helly_center(bodies: &[ConvexBody]) -> Result<(HPoint, f64)> {
    if bodies.is_empty() {
        return Err(Error::Domain("no bodies".into()));
    }
    let dim = bodies[0].dim();
    for (i, a) in bodies.iter().enumerate() {
        if a.dim() != dim {
            return Err(Error::Domain("mixed dimensions".into()));
        }
        for (j, b) in bodies.iter().enumerate().skip(i + 1) {
            let d = body_distance(a, b);
            if d > 1e-6 {
                return Err(Error::Precondition(format!(
                    "bodies {i} and {j} do not intersect (distance {d:.3e})"
                )));
            }
        }
    }
    let witnesses: Vec<HPoint> = bodies
        .iter()
        .map(|b| b.witness())
        .collect::<Result<_>>()?;
    let seed = karcher_mean(&witnesses)?;

    let mut best: Option<(HPoint, f64)> = None;
    for start in multistarts(&seed, &witnesses) {
        let cand = minimax_descent(bodies, start);
        let v = max_body_distance(bodies, &cand);
        if best.as_ref().map(|(_, bv)| v < *bv).unwrap_or(true) {
            best = Some((cand, v));
        }
    }
    Ok(best.expect("at least one start"))
}

fn max_body_distance(bodies: &[ConvexBody], x: &HPoint) -> f64 {
    bodies
        .iter()
        .map(|b| b.distance_to(x))
        .fold(0.0, f64::max)
}

fn multistarts(seed: &HPoint, witnesses: &[HPoint]) -> Vec<HPoint> {
    let mut out = vec![seed.clone()];
    if let Some(w) = witnesses.first() {
        out.push(w.clone());
    }
    if witnesses.len() > 1 {
        out.push(witnesses[witnesses.len() / 2].clone());
    }
    out
}

fn minimax_descent(bodies: &[ConvexBody], start: HPoint) -> HPoint {
    let mut x = start;
    let mut fx = max_body_distance(bodies, &x);
    let mut best = (x.clone(), fx);
    let mut step = (fx * 0.5).max(1e-3);
    for it in 0..2500 {
        // Subgradient: move toward the nearest point of the farthest body.
        let far = bodies
            .iter()
            .max_by(|a, b| {
                a.distance_to(&x)
                    .partial_cmp(&b.distance_to(&x))
                    .unwrap()
            })
            .expect("nonempty");
        let Ok(target) = far.project(&x) else { break };
        let d = dist(&x, &target);
        if d < 1e-12 {
            break;
        }
        let v = tangent_part(target.coords(), x.coords());
        let vn = mink(&v, &v).sqrt();
        let s = step.min(d);
        let cand = HPoint::from_timelike(x.coords() * s.cosh() + (&v / vn) * s.sinh());
        let Ok(cand) = cand else { break };
        let fc = max_body_distance(bodies, &cand);
        if fc < fx {
            x = cand;
            fx = fc;
            if fx < best.1 {
                best = (x.clone(), fx);
            }
            step *= 1.2;
        } else {
            step *= 0.6;
        }
        if step < 1e-9 {
            break;
        }
        // Diminishing floor keeps the subgradient method moving early on.
        if it % 100 == 99 {
            step = step.max(1e-4);
        }
    }
    best.0
}

fn karcher_mean(points: &[HPoint]) -> Result<HPoint> {
    let n = points[0].coords().len();
    let mut acc = nalgebra::DVector::zeros(n);
    for p in points {
        acc += p.coords();
    }
    let mut x = HPoint::from_timelike(acc)?;
    // A few fixed-point iterations of the tangent-mean update.
    for _ in 0..20 {
        let mut t = nalgebra::DVector::zeros(n);
        for p in points {
            let d = dist(&x, p);
            if d < 1e-14 {
                continue;
            }
            let v = tangent_part(p.coords(), x.coords());
            let vn = mink(&v, &v).sqrt();
            t += (&v / vn) * d;
        }
        t /= points.len() as f64;
        let tn = mink(&t, &t).max(0.0).sqrt();
        if tn < 1e-12 {
            break;
        }
        x = HPoint::from_timelike(x.coords() * tn.cosh() + (&t / tn) * tn.sinh())?;
    }
    Ok(x)
}

/// First pair of thin sets (in index order) at distance greater than
/// `d_target`, or `None`. Thin sets are required pairwise disjoint.
pub fn distant_pair(
    thin_sets: &[ThinSet],
    d_target: f64,
    pair_cap: u32,
) -> Result<Option<(usize, usize)>> {
    for (i, a) in thin_sets.iter().enumerate() {
        for (j, b) in thin_sets.iter().enumerate().skip(i + 1) {
            let d = thin_set_distance(a, b, pair_cap);
            if d <= 1e-9 {
                return Err(Error::Precondition(format!(
                    "thin sets {i} and {j} are not disjoint"
                )));
            }
            if d > d_target {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

/// Axis midpoint distance helper shared by tests: the closest points of two
/// loxodromic axes.
pub fn axis_distance(g1: &Isometry, g2: &Isometry) -> Result<f64> {
    let a1 = g1.axis()?;
    let a2 = g2.axis()?;
    crate::perpendicular::distance_between_lines(&a1, &a2).map(|(d, _, _)| d)
}

/// Coarse Helly radius `n * delta` for dimension n.
pub fn helly_radius(n: usize) -> f64 {
    n as f64 * delta()
}

/// Local helper for tests and suites: the geodesic through two points.
pub fn through(a: &HPoint, b: &HPoint) -> Result<GeodesicSegment> {
    GeodesicSegment::between(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::dvector;

    fn sl2(a: f64, b: f64, c: f64, d: f64) -> Isometry {
        Isometry::from_sl2r(a, b, c, d).unwrap()
    }

    #[test]
    fn single_loxodromic_generator_is_found_at_length_one() {
        let g = Isometry::boost(2, 1, 1.0).unwrap();
        let w = find_lox_word(&[g], 4, SearchMode::Free).unwrap();
        assert_eq!(w.length(), 1);
        assert_eq!(w.letters, vec![(0, 1)]);
    }

    #[test]
    fn parabolic_pair_found_at_length_two_with_trace_three() {
        // g1 = [[1,1],[0,1]], g2 = [[1,0],[-1,1]]: g1 g2^-1 has trace 3.
        let g1 = sl2(1.0, 1.0, 0.0, 1.0);
        let g2 = sl2(1.0, 0.0, -1.0, 1.0);
        let w = find_lox_word(&[g1, g2], 4, SearchMode::Free).unwrap();
        assert_eq!(w.length(), 2);
        assert_eq!(w.letters, vec![(0, 1), (1, -1)]);
        assert_abs_diff_eq!(
            w.evaluation.translation_length(),
            2.0 * 1.5_f64.acosh(),
            epsilon = 1e-8
        );
    }

    #[test]
    fn power_restricted_search_succeeds_on_parabolic_pair() {
        let g1 = sl2(1.0, 1.0, 0.0, 1.0);
        let g2 = sl2(1.0, 0.0, -1.0, 1.0);
        let w = find_lox_word(&[g1, g2], 8, SearchMode::Powers).unwrap();
        assert!(w.evaluation.classify().is_loxodromic());
        assert_eq!(w.letters.len(), 2);
        assert!(w.letters.iter().all(|(_, e)| *e > 0));
    }

    #[test]
    fn half_turn_pair_composes_to_translation() {
        // Two rotations by pi about points at distance 1: the product
        // translates by 2.
        let p = HPoint::origin(2);
        let q = HPoint::new(dvector![1.0_f64.cosh(), 1.0_f64.sinh(), 0.0]).unwrap();
        let s1 = Isometry::point_reflection(&p);
        let s2 = Isometry::point_reflection(&q);
        let w = find_lox_word(&[s1, s2], 4, SearchMode::Free).unwrap();
        assert_eq!(w.length(), 2);
        assert_abs_diff_eq!(w.evaluation.translation_length(), 2.0, epsilon = 1e-8);
    }

    #[test]
    fn product_check_on_distant_parabolics() {
        // Large translations put the Margulis regions far apart.
        let eps = 0.5;
        let g1 = sl2(1.0, 60.0, 0.0, 1.0);
        let g2 = sl2(1.0, 0.0, 60.0, 1.0);
        let check = lox_product_check(&g1, &g2, eps).unwrap();
        assert!(check.hypothesis_met, "margin {}", check.margin);
        assert_eq!(check.product_class, "loxodromic");
        // Trace of the product is 60*60 + 2.
        let expected_l = 2.0 * (3602.0_f64 / 2.0).acosh();
        assert_abs_diff_eq!(check.product_translation_length, expected_l, epsilon = 1e-6);
    }

    #[test]
    fn product_check_reports_unmet_hypothesis() {
        // The classic trace-1 pair: elliptic product, hypothesis not met.
        let g1 = sl2(1.0, 1.0, 0.0, 1.0);
        let g2 = sl2(1.0, 0.0, -1.0, 1.0);
        let check = lox_product_check(&g1, &g2, 0.5).unwrap();
        assert!(!check.hypothesis_met);
        assert_eq!(check.product_class, "elliptic");
        // g2 g1 = [[1,1],[-1,0]], trace 1.
        let g = g2.compose(&g1);
        assert_eq!(g.classify().name(), "elliptic");
    }

    #[test]
    fn product_check_rejects_shared_fixed_point() {
        let g1 = sl2(1.0, 1.0, 0.0, 1.0);
        let g2 = sl2(1.0, 2.5, 0.0, 1.0);
        assert!(matches!(
            lox_product_check(&g1, &g2, 0.5),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn conjugated_pair_same_verdict() {
        let eps = 0.5;
        let h = Isometry::boost(2, 2, 0.8)
            .unwrap()
            .compose(&Isometry::rotation(2, 1, 2, 0.5).unwrap());
        let g1 = sl2(1.0, 60.0, 0.0, 1.0);
        let g2 = sl2(1.0, 0.0, 60.0, 1.0);
        let c1 = lox_product_check(&g1, &g2, eps).unwrap();
        let g1c = h.compose(&g1).compose(&h.inverse());
        let g2c = h.compose(&g2).compose(&h.inverse());
        let c2 = lox_product_check(&g1c, &g2c, eps).unwrap();
        assert_eq!(c1.hypothesis_met, c2.hypothesis_met);
        assert_eq!(c1.product_class, c2.product_class);
        assert_abs_diff_eq!(c1.region_distance, c2.region_distance, epsilon = 1e-3);
    }

    #[test]
    fn helly_center_common_point_gives_zero() {
        let o = HPoint::origin(2);
        let bodies = vec![
            ConvexBody::ball(o.clone(), 1.0).unwrap(),
            ConvexBody::ball(
                HPoint::new(dvector![0.5_f64.cosh(), 0.5_f64.sinh(), 0.0]).unwrap(),
                1.0,
            )
            .unwrap(),
            ConvexBody::ball(
                HPoint::new(dvector![0.5_f64.cosh(), 0.0, 0.5_f64.sinh()]).unwrap(),
                1.0,
            )
            .unwrap(),
        ];
        let (_, value) = helly_center(&bodies).unwrap();
        assert!(value < 1e-4, "value {value}");
    }

    #[test]
    fn helly_center_touching_balls_circumradius() {
        // Three unit balls with pairwise-touching centers (equilateral side
        // 2): the minimax center is the circumcenter and the value is the
        // circumradius minus 1.
        let r_circ = {
            // cosh(2) = 1 + 1.5 sinh^2(R)
            let s2 = (2.0_f64.cosh() - 1.0) / 1.5;
            s2.sqrt().asinh()
        };
        let centers = equilateral_centers(2.0);
        let bodies: Vec<_> = centers
            .iter()
            .map(|c| ConvexBody::ball(c.clone(), 1.0).unwrap())
            .collect();
        let (x, value) = helly_center(&bodies).unwrap();
        assert_abs_diff_eq!(value, r_circ - 1.0, epsilon = 1e-3);
        assert!(value <= helly_radius(2) + 1e-4);
        for c in &centers {
            assert_abs_diff_eq!(dist(&x, c), r_circ, epsilon = 5e-3);
        }
    }

    fn equilateral_centers(side: f64) -> Vec<HPoint> {
        // Circumradius R from cosh(side) = 1 + 1.5 sinh^2 R; vertices at
        // angles 0, 2pi/3, 4pi/3.
        let r = (((side.cosh() - 1.0) / 1.5).sqrt()).asinh();
        (0..3)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                HPoint::renormalize(dvector![
                    r.cosh(),
                    r.sinh() * th.cos(),
                    r.sinh() * th.sin()
                ])
                .unwrap()
            })
            .collect()
    }

    #[test]
    fn helly_rejects_disjoint_pair() {
        let a = ConvexBody::ball(HPoint::origin(2), 0.3).unwrap();
        let far = HPoint::new(dvector![3.0_f64.cosh(), 3.0_f64.sinh(), 0.0]).unwrap();
        let b = ConvexBody::ball(far, 0.3).unwrap();
        assert!(matches!(
            helly_center(&[a, b]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn distant_pair_finds_far_sets() {
        let eps = 0.5;
        let mk = |c: f64, inv: bool| {
            let g = if inv {
                sl2(1.0, 0.0, c, 1.0)
            } else {
                sl2(1.0, c, 0.0, 1.0)
            };
            ThinSet::new(g, eps, 16).unwrap()
        };
        // Far pair plus a bystander.
        let sets = vec![mk(60.0, false), mk(60.0, true)];
        let pair = distant_pair(&sets, 5.0, 4).unwrap();
        assert_eq!(pair, Some((0, 1)));
        // Clustered sets yield none.
        let close = vec![mk(1.0, false), mk(1.2, true)];
        assert_eq!(distant_pair(&close, 50.0, 4).unwrap(), None);
    }
}
