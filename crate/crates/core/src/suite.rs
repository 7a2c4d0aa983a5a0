//! Seeded, deterministic property suites over the whole engine. Instances
//! fan out across a rayon pool with per-index derived randomness, so reports
//! are byte-identical for a fixed (suite, args, seed) regardless of thread
//! count.

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::body::ConvexBody;
use crate::bounds::BoundFormulas;
use crate::comparison::{
    check_quadrilateral_bounds, check_right_triangle_bound, compare_triangle, polygon_nearness,
    QuadReport,
};
use crate::error::{Error, Result};
use crate::geodesic::{angle_at, dist, dist_to_geodesic, GeodesicSegment};
use crate::horosphere::{busemann_origin, ray_decay, Horoball};
use crate::isometry::{Classification, Isometry};
use crate::limit::{
    concentric_h2, conicality_diagnostic, separation_audit, translated_h3, ConicalityEvidence,
    GeodesicScaffold, TauSequence,
};
use crate::loxodromic::{find_lox_word, helly_center, helly_radius, lox_product_check, SearchMode};
use crate::margulis::large_displacement_power;
use crate::point::{HPoint, IdealPoint};
use crate::quasigeodesic::{
    bisector_gap_check, certify, long_edge_threshold, mixed_edge_threshold, CertMode,
    PiecewisePath,
};
use crate::rng::{
    derive_rng, random_parabolic, random_parabolic_pair, random_point, random_unit_spatial,
};
use crate::tol::{delta, DEFAULT_EPSILON};

/// Outcome of one suite run. `wall_time_ms` is reported out-of-band (stderr)
/// and excluded from the serialized bytes so reports stay deterministic.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub dim: usize,
    pub seed: u64,
    pub instances: u64,
    pub violations: u64,
    /// Largest (value - bound) over all inequality checks; negative values
    /// mean everything passed with that much slack.
    pub worst_margin: f64,
    /// Sampling resolutions and tolerances in force, per check.
    pub resolution: BTreeMap<String, f64>,
    /// Instance counts per check kind.
    pub checks: BTreeMap<String, u64>,
    #[serde(skip)]
    pub wall_time_ms: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Default, Clone)]
struct Tally {
    violations: u64,
    worst: f64,
    counts: BTreeMap<String, u64>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            violations: 0,
            worst: f64::NEG_INFINITY,
            counts: BTreeMap::new(),
        }
    }

    /// Record a check with signed margin (value - bound); positive beyond
    /// `slack` counts as a violation.
    fn check(&mut self, kind: &str, margin: f64, slack: f64) {
        *self.counts.entry(kind.to_string()).or_insert(0) += 1;
        self.worst = self.worst.max(margin);
        if margin > slack {
            self.violations += 1;
        }
    }

    fn fail(&mut self, kind: &str) {
        *self.counts.entry(kind.to_string()).or_insert(0) += 1;
        self.violations += 1;
        self.worst = self.worst.max(f64::INFINITY);
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.violations += other.violations;
        self.worst = self.worst.max(other.worst);
        for (k, v) in other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
        self
    }
}

/// Run a named suite: one of `inequalities`, `quasigeodesic`, `lox-factory`,
/// `limit`, `busemann`, `packing`.
pub fn run_suite(
    name: &str,
    dim: usize,
    samples: u64,
    seed: u64,
    tol: Option<f64>,
) -> Result<SuiteReport> {
    let started = Instant::now();
    let mut report = match name {
        "inequalities" => inequalities_suite(dim, samples, seed, tol),
        "quasigeodesic" => quasigeodesic_suite(dim, samples, seed),
        "lox-factory" => lox_factory_suite(dim, samples, seed),
        "limit" => limit_suite(dim, samples, seed),
        "busemann" => busemann_suite(dim, samples, seed),
        "packing" => packing_suite(dim, samples, seed),
        other => Err(Error::Domain(format!("unknown suite {other:?}"))),
    }?;
    report.wall_time_ms = started.elapsed().as_millis();
    Ok(report)
}

pub const SUITE_NAMES: [&str; 6] = [
    "inequalities",
    "quasigeodesic",
    "lox-factory",
    "limit",
    "busemann",
    "packing",
];

fn finish(
    name: &str,
    dim: usize,
    seed: u64,
    instances: u64,
    tally: Tally,
    resolution: BTreeMap<String, f64>,
) -> SuiteReport {
    SuiteReport {
        suite: name.into(),
        dim,
        seed,
        instances,
        violations: tally.violations,
        worst_margin: if tally.worst == f64::NEG_INFINITY {
            0.0
        } else {
            tally.worst
        },
        resolution,
        checks: tally.counts,
        wall_time_ms: 0,
    }
}

fn par_tally(samples: u64, f: impl Fn(u64) -> Tally + Sync + Send) -> Tally {
    (0..samples)
        .into_par_iter()
        .map(f)
        .reduce(Tally::new, Tally::merge)
}

// ---- inequalities ----------------------------------------------------------

fn inequalities_suite(
    dim: usize,
    samples: u64,
    seed: u64,
    tol: Option<f64>,
) -> Result<SuiteReport> {
    let slack = tol.unwrap_or(1e-9);
    let set_slack = 1e-6; // sampled set-distance checks
    let tally = par_tally(samples, |i| {
        let mut t = Tally::new();
        let mut rng = derive_rng(seed, i);

        // Right-triangle bound on a triangle with obtuse angle at C.
        let (a_side, beta) = obtuse_triangle_data(&mut rng, dim);
        t.check(
            "right-triangle",
            a_side.cosh() * beta.sin() - 1.0,
            slack,
        );
        debug_assert!(check_right_triangle_bound(a_side, beta) || a_side.cosh() * beta.sin() > 1.0 + 1e-9);

        // Quadrilateral bounds on a generated three-right-angle instance.
        let (a, b, c, d) = sampled_quadrilateral(&mut rng, dim);
        match check_quadrilateral_bounds(&a.into(), &b, &c, &d) {
            Ok(QuadReport::Checked { bound1, bound2 }) => {
                let m1 = dist(&b, &c).sinh() * dist(&c, &d).sinh() - 1.0;
                t.check("quad-bound1", m1, slack);
                if !bound1 {
                    t.fail("quad-bound1-flag");
                }
                if let Some(ok2) = bound2 {
                    t.check("quad-bound2", if ok2 { -1.0 } else { 1.0 }, 0.0);
                }
            }
            Ok(QuadReport::HypothesisNotMet { .. }) => {
                // A signal, not a failure; the generator occasionally bends
                // past the tolerance band.
                *t.counts.entry("quad-hypothesis-miss".into()).or_insert(0) += 1;
            }
            Err(_) => t.fail("quad-error"),
        }

        // Chord-to-chain nearness for m in {2, 4, 8}.
        let m = [2usize, 4, 8][(i % 3) as usize];
        let chain = random_chain(&mut rng, dim, m);
        match polygon_nearness(&chain, 200) {
            Ok((measured, bound)) => t.check("polygon-nearness", measured - bound, set_slack),
            Err(_) => t.fail("polygon-nearness"),
        }

        // Thin triangles at delta = arccosh(sqrt 2).
        let tri: Vec<HPoint> = (0..3).map(|_| random_point(&mut rng, dim, 2.5)).collect();
        if dist(&tri[0], &tri[1]) > 1e-6
            && dist(&tri[1], &tri[2]) > 1e-6
            && dist(&tri[2], &tri[0]) > 1e-6
        {
            let worst = thin_triangle_excess(&tri, 100);
            t.check("delta-thin", worst - delta(), set_slack);

            // Comparison angles agree with measured angles in constant
            // curvature.
            if let Ok(cmp) = compare_triangle(&tri[0], &tri[1], &tri[2]) {
                if !cmp.degenerate {
                    let worst = cmp
                        .model_angles
                        .iter()
                        .zip(&cmp.comparison.angles)
                        .map(|(x, y)| (x - y).abs())
                        .fold(0.0, f64::max);
                    t.check("comparison-equality", worst - 1e-8, 0.0);
                }
            }
        }
        t
    });
    let mut resolution = BTreeMap::new();
    resolution.insert("chord-samples".into(), 200.0);
    resolution.insert("side-samples".into(), 100.0);
    resolution.insert("tolerance".into(), slack);
    resolution.insert("set-distance-tolerance".into(), set_slack);
    Ok(finish("inequalities", dim, seed, samples, tally, resolution))
}

/// Triangle with angle >= pi/2 at C; returns (side a = d(B,C), angle beta at B).
fn obtuse_triangle_data(rng: &mut ChaCha8Rng, dim: usize) -> (f64, f64) {
    let c = random_point(rng, dim, 1.5);
    let u = random_unit_tangent_at(rng, &c);
    let gamma: f64 = rng.gen_range(std::f64::consts::FRAC_PI_2..3.0);
    let v = rotate_toward(rng, &c, &u, gamma);
    let la: f64 = rng.gen_range(0.2..3.0);
    let lb: f64 = rng.gen_range(0.2..3.0);
    let b = exp_point(&c, &u, la);
    let a = exp_point(&c, &v, lb);
    let beta = angle_at(&b, &c.clone().into(), &a.clone().into()).unwrap();
    (dist(&b, &c), beta)
}

/// Quadrilateral [ABCD] with right angles at B, C, D: perpendiculars erected
/// at distances p, q from a right corner meet when sinh p sinh q < 1.
fn sampled_quadrilateral(rng: &mut ChaCha8Rng, dim: usize) -> (HPoint, HPoint, HPoint, HPoint) {
    loop {
        let p: f64 = rng.gen_range(0.1..1.8);
        let q: f64 = rng.gen_range(0.1..1.8);
        if p.sinh() * q.sinh() >= 0.985 {
            continue;
        }
        let c = random_point(rng, dim, 1.0);
        let u = random_unit_tangent_at(rng, &c);
        let v = rotate_toward(rng, &c, &u, std::f64::consts::FRAC_PI_2);
        let b = exp_point(&c, &u, p);
        let d = exp_point(&c, &v, q);
        // Fourth vertex: the intersection of the two perpendiculars, found
        // by the closed form in the 2-plane spanned by (c, u, v).
        let denom = (1.0 - (p.sinh() * q.sinh()).powi(2)).sqrt();
        let coords = c.coords() * (p.cosh() * q.cosh() / denom)
            + u * (p.sinh() * q.cosh() / denom)
            + v * (q.sinh() * p.cosh() / denom);
        if let Ok(a) = HPoint::from_timelike(coords) {
            return (a, b, c, d);
        }
    }
}

fn random_chain(rng: &mut ChaCha8Rng, dim: usize, m: usize) -> Vec<HPoint> {
    let mut pts = vec![random_point(rng, dim, 1.0)];
    let mut here = pts[0].clone();
    let mut dir = random_unit_tangent_at(rng, &here);
    for _ in 0..m {
        let len: f64 = rng.gen_range(0.3..2.2);
        let next = exp_point(&here, &dir, len);
        // Transport a fresh direction at the new vertex.
        let turn: f64 = rng.gen_range(0.6..std::f64::consts::PI);
        let incoming = crate::minkowski::tangent_part(here.coords(), next.coords());
        let incoming = &incoming / crate::minkowski::mink(&incoming, &incoming).sqrt();
        dir = rotate_toward(rng, &next, &incoming, turn);
        here = next.clone();
        pts.push(next);
    }
    pts
}

fn thin_triangle_excess(tri: &[HPoint], samples_per_side: usize) -> f64 {
    let sides = [
        GeodesicSegment::between(&tri[0], &tri[1]).unwrap(),
        GeodesicSegment::between(&tri[1], &tri[2]).unwrap(),
        GeodesicSegment::between(&tri[2], &tri[0]).unwrap(),
    ];
    let mut worst = 0.0_f64;
    for (k, side) in sides.iter().enumerate() {
        for s in 0..=samples_per_side {
            let p = side
                .eval(side.length() * s as f64 / samples_per_side as f64)
                .unwrap();
            let d = dist_to_geodesic(&p, &sides[(k + 1) % 3])
                .min(dist_to_geodesic(&p, &sides[(k + 2) % 3]));
            worst = worst.max(d);
        }
    }
    worst
}

fn random_unit_tangent_at(rng: &mut ChaCha8Rng, p: &HPoint) -> DVector<f64> {
    let raw = random_unit_spatial(rng, p.dim());
    let t = crate::minkowski::tangent_part(&raw, p.coords());
    &t / crate::minkowski::mink(&t, &t).sqrt()
}

/// Unit tangent at the basepoint of `u` making angle `angle` with `u`.
fn rotate_toward(rng: &mut ChaCha8Rng, p: &HPoint, u: &DVector<f64>, angle: f64) -> DVector<f64> {
    // Random unit tangent orthogonal to u.
    let w;
    loop {
        let raw = random_unit_tangent_at(rng, p);
        let proj = &raw - u * crate::minkowski::mink(&raw, u);
        let n2 = crate::minkowski::mink(&proj, &proj);
        if n2 > 1e-10 {
            w = proj / n2.sqrt();
            break;
        }
    }
    u * angle.cos() + &w * angle.sin()
}

fn exp_point(p: &HPoint, u: &DVector<f64>, t: f64) -> HPoint {
    HPoint::from_timelike(p.coords() * t.cosh() + u * t.sinh()).expect("exponential point")
}

// ---- quasigeodesic ---------------------------------------------------------

/// Random developed path satisfying the long-edges hypotheses at `theta`.
pub fn random_long_path(rng: &mut ChaCha8Rng, dim: usize, theta: f64, edges: usize) -> PiecewisePath {
    let level = long_edge_threshold(theta).unwrap();
    let mut parts = Vec::with_capacity(edges);
    let mut u = random_unit_spatial(rng, dim);
    for _ in 0..edges {
        let len: f64 = level + rng.gen_range(1e-9..3.0);
        parts.push((u.clone(), len));
        let ang: f64 = rng.gen_range(theta..std::f64::consts::PI);
        u = turn_spatial(rng, dim, &u, ang);
    }
    PiecewisePath::from_turtle(Isometry::identity(dim), parts).unwrap()
}

/// Random developed path satisfying the mixed long/short hypotheses at
/// (`theta`, `eps`): short edges appear between long ones at right angles.
pub fn random_mixed_path(
    rng: &mut ChaCha8Rng,
    dim: usize,
    theta: f64,
    eps: f64,
    edges: usize,
) -> PiecewisePath {
    let level = mixed_edge_threshold(theta, eps).unwrap();
    let mut parts = Vec::with_capacity(edges);
    let mut u = random_unit_spatial(rng, dim);
    let mut prev_short = true; // forces the first edge long
    for k in 0..edges {
        let terminal_next = k + 1 == edges;
        let make_short = !prev_short && !terminal_next && rng.gen_bool(0.4);
        let len: f64 = if make_short {
            rng.gen_range(eps..(level * 0.5).max(eps + 0.2))
        } else {
            level + rng.gen_range(1e-9..3.0)
        };
        parts.push((u.clone(), len));
        // Angles adjacent to a short edge are exactly right; others >= theta.
        let ang: f64 = if make_short || prev_short {
            std::f64::consts::FRAC_PI_2 + rng.gen_range(0.0..0.4)
        } else {
            rng.gen_range(theta..std::f64::consts::PI)
        };
        u = turn_spatial(rng, dim, &u, ang);
        prev_short = make_short;
    }
    PiecewisePath::from_turtle(Isometry::identity(dim), parts).unwrap()
}

/// Next spatial direction making vertex angle `ang` with the previous one.
fn turn_spatial(rng: &mut ChaCha8Rng, dim: usize, u: &DVector<f64>, ang: f64) -> DVector<f64> {
    let w;
    loop {
        let raw = random_unit_spatial(rng, dim);
        let proj = &raw - u * u.dot(&raw);
        let n = proj.norm();
        if n > 1e-9 {
            w = proj / n;
            break;
        }
    }
    // Vertex angle between arcs = arccos(-<u, u_next>).
    -(u * ang.cos()) + w * ang.sin()
}

fn quasigeodesic_suite(dim: usize, samples: u64, seed: u64) -> Result<SuiteReport> {
    let theta = std::f64::consts::FRAC_PI_2;
    let eps = 1.0;
    let tally = par_tally(samples, |i| {
        let mut t = Tally::new();
        let mut rng = derive_rng(seed, i);
        let edges = rng.gen_range(4..9);
        let path = random_long_path(&mut rng, dim, theta, edges);
        match certify(&path, CertMode::Long, theta, eps) {
            Ok(cert) if cert.is_certified() => {
                t.check("long-certified", -1.0, 0.0);
                t.check("long-lambda-dominates", cert.measured.0 - cert.lambda, 0.0);
                t.check("long-alpha-dominates", cert.measured.1 - cert.alpha, 0.0);
                match bisector_gap_check(&path, theta) {
                    Ok(gaps) => {
                        for g in gaps {
                            t.check("bisector-gap", 1.0 - g, 1e-6);
                        }
                    }
                    Err(_) => t.fail("bisector-gap"),
                }
            }
            _ => t.fail("long-certified"),
        }
        // One mixed-mode instance per ten long ones.
        if i % 10 == 0 {
            let path = random_mixed_path(&mut rng, dim, theta, DEFAULT_EPSILON, 7);
            match certify(&path, CertMode::LongShort, theta, DEFAULT_EPSILON) {
                Ok(cert) if cert.is_certified() => {
                    t.check("mixed-certified", -1.0, 0.0);
                    t.check("mixed-lambda-dominates", cert.measured.0 - cert.lambda, 0.0);
                    t.check("mixed-alpha-dominates", cert.measured.1 - cert.alpha, 0.0);
                }
                _ => t.fail("mixed-certified"),
            }
        }
        t
    });
    let mut resolution = BTreeMap::new();
    resolution.insert("pair-samples".into(), 1000.0);
    resolution.insert("gap-tolerance".into(), 1e-6);
    Ok(finish("quasigeodesic", dim, seed, samples, tally, resolution))
}

// ---- loxodromic factory -----------------------------------------------------

fn lox_factory_suite(dim: usize, samples: u64, seed: u64) -> Result<SuiteReport> {
    if dim != 2 && dim != 3 {
        return Err(Error::Domain("lox-factory runs in H^2 or H^3".into()));
    }
    let eps = DEFAULT_EPSILON;
    let tally = par_tally(samples, |i| {
        let mut t = Tally::new();
        let mut rng = derive_rng(seed, i);
        // Shears spread the Margulis-region distances across the product
        // threshold.
        let shear = 10f64.powf(rng.gen_range(-0.3..2.0));
        let (g1, g2) = random_parabolic_pair(&mut rng, dim, shear);
        match find_lox_word(&[g1.clone(), g2.clone()], 6, SearchMode::Free) {
            Ok(word) => {
                t.check("word-found", -1.0, 0.0);
                if !word.evaluation.classify().is_loxodromic() {
                    t.fail("word-loxodromic");
                } else {
                    t.check("word-loxodromic", -1.0, 0.0);
                }
                t.check("word-length", word.length() as f64 - 4.0, 0.0);
                // Power-restricted search also succeeds.
                match find_lox_word(&[g1.clone(), g2.clone()], 12, SearchMode::Powers) {
                    Ok(_) => t.check("powers-found", -1.0, 0.0),
                    Err(_) => t.fail("powers-found"),
                }
            }
            Err(_) => t.fail("word-found"),
        }
        // Product criterion: a met hypothesis must yield a loxodromic
        // product (the check errors otherwise).
        match lox_product_check(&g1, &g2, eps) {
            Ok(check) => {
                if check.hypothesis_met {
                    t.check("product-criterion", -check.margin, 0.0);
                } else {
                    *t.counts.entry("product-hypothesis-miss".into()).or_insert(0) += 1;
                }
            }
            Err(Error::Precondition(_)) => {
                *t.counts.entry("product-degenerate".into()).or_insert(0) += 1;
            }
            Err(_) => t.fail("product-criterion"),
        }
        // Coarse Helly families every tenth instance.
        if i % 10 == 0 {
            let k = 3 + (i / 10 % 4) as usize;
            let bodies = random_intersecting_bodies(&mut rng, dim, k);
            match helly_center(&bodies) {
                Ok((_, value)) => t.check("helly-value", value - helly_radius(dim), 1e-4),
                Err(_) => t.fail("helly-precondition"),
            }
        }
        t
    });
    let mut resolution = BTreeMap::new();
    resolution.insert("word-max-length".into(), 6.0);
    resolution.insert("helly-tolerance".into(), 1e-4);
    resolution.insert("epsilon".into(), eps);
    Ok(finish("lox-factory", dim, seed, samples, tally, resolution))
}

/// Pairwise-intersecting balls/horoballs: each body contains one shared
/// witness point per pair by construction.
pub fn random_intersecting_bodies(rng: &mut ChaCha8Rng, dim: usize, k: usize) -> Vec<ConvexBody> {
    let hub = random_point(rng, dim, 0.5);
    let mut pair_points = vec![vec![HPoint::origin(dim); k]; k];
    for i in 0..k {
        for j in 0..k {
            if i < j {
                let p = perturb(rng, &hub, 0.8);
                pair_points[i][j] = p.clone();
                pair_points[j][i] = p;
            }
        }
    }
    (0..k)
        .map(|i| {
            let witnesses: Vec<&HPoint> = (0..k).filter(|j| *j != i).map(|j| &pair_points[i][j]).collect();
            if rng.gen_bool(0.3) {
                let u = random_unit_spatial(rng, dim);
                let xi = IdealPoint::from_null({
                    let mut v = u.clone();
                    v[0] = 1.0;
                    v
                })
                .unwrap();
                let level = witnesses
                    .iter()
                    .map(|p| busemann_origin(&xi, p))
                    .fold(f64::NEG_INFINITY, f64::max);
                ConvexBody::Horoball(Horoball::new(xi, level + 1e-9))
            } else {
                let center = perturb(rng, &hub, 1.0);
                let radius = witnesses
                    .iter()
                    .map(|p| dist(&center, p))
                    .fold(0.0, f64::max);
                ConvexBody::ball(center, radius + 1e-9).unwrap()
            }
        })
        .collect()
}

fn perturb(rng: &mut ChaCha8Rng, p: &HPoint, scale: f64) -> HPoint {
    let u = random_unit_tangent_at(rng, p);
    let t: f64 = rng.gen_range(0.0..scale);
    exp_point(p, &u, t)
}

// ---- packing / displacement ---------------------------------------------------

fn packing_suite(dim: usize, samples: u64, seed: u64) -> Result<SuiteReport> {
    if dim != 2 && dim != 3 {
        return Err(Error::Domain("packing suite runs in H^2 or H^3".into()));
    }
    let eps = DEFAULT_EPSILON;
    let bounds = BoundFormulas::standard(dim)?;
    let tally = par_tally(samples, |i| {
        let mut t = Tally::new();
        let mut rng = derive_rng(seed, i);
        let g = random_parabolic(&mut rng, dim, 2.0);
        // Find a point outside the thin part.
        let mut x = None;
        for _ in 0..50 {
            let cand = random_point(&mut rng, dim, 2.0);
            if g.displacement(&cand) >= eps * 1.5 {
                x = Some(cand);
                break;
            }
        }
        let Some(x) = x else {
            t.fail("outside-point");
            return t;
        };
        let d_target: f64 = rng.gen_range(1.0..6.0);
        match large_displacement_power(&g, &x, eps, d_target, 32, &bounds) {
            Ok(i_pow) => {
                let n_bound = bounds.displacement_power_bound(eps, d_target).unwrap();
                t.check("power-within-bound", i_pow as f64 - n_bound, 0.0);
            }
            Err(Error::Precondition(_)) => {
                *t.counts.entry("inside-thin-part".into()).or_insert(0) += 1;
            }
            Err(_) => t.fail("power-within-bound"),
        }
        // Packing census: greedily 2r-separated points in B(x0, R) never
        // exceed the volume quotient.
        let r: f64 = rng.gen_range(0.15..0.5);
        let big_r: f64 = rng.gen_range(1.0..2.2);
        let x0 = random_point(&mut rng, dim, 1.0);
        let mut kept: Vec<HPoint> = Vec::new();
        for _ in 0..400 {
            let cand = perturb(&mut rng, &x0, big_r);
            if dist(&cand, &x0) <= big_r && kept.iter().all(|p| dist(p, &cand) >= 2.0 * r) {
                kept.push(cand);
            }
        }
        let bound = bounds.packing_count(big_r, r).unwrap();
        t.check("packing-count", kept.len() as f64 - bound, 0.0);
        t
    });
    let mut resolution = BTreeMap::new();
    resolution.insert("power-cap".into(), 32.0);
    resolution.insert("epsilon".into(), eps);
    Ok(finish("packing", dim, seed, samples, tally, resolution))
}

// ---- busemann decay -----------------------------------------------------------

fn busemann_suite(dim: usize, samples: u64, seed: u64) -> Result<SuiteReport> {
    let tally = par_tally(samples, |i| {
        let mut t = Tally::new();
        let mut rng = derive_rng(seed, i);
        let u = random_unit_spatial(&mut rng, dim);
        let xi = IdealPoint::from_null({
            let mut v = u.clone();
            v[0] = 1.0;
            v
        })
        .unwrap();
        let y = random_point(&mut rng, dim, 2.0);
        // Slide a second point onto y's horosphere about xi.
        let z0 = random_point(&mut rng, dim, 2.0);
        let shiftv = busemann_origin(&xi, &z0) - busemann_origin(&xi, &y);
        let Ok(ray) = GeodesicSegment::ray(&z0, &xi) else {
            t.fail("horosphere-pair");
            return t;
        };
        let Ok(z) = ray.extended().eval(shiftv) else {
            t.fail("horosphere-pair");
            return t;
        };
        if (busemann_origin(&xi, &z) - busemann_origin(&xi, &y)).abs() > 1e-9 {
            t.fail("horosphere-pair");
            return t;
        }
        let mut prev = f64::INFINITY;
        for step in 0..=8 {
            let time = step as f64 * 0.75;
            match ray_decay(&xi, &y, &z, time) {
                Ok((d, bound)) => {
                    t.check("decay-bound", d - bound, 1e-9);
                    t.check("decay-monotone", d - prev, 1e-9);
                    prev = d;
                }
                Err(_) => t.fail("decay-bound"),
            }
        }
        // Busemann is 1-Lipschitz.
        let w = random_point(&mut rng, dim, 2.5);
        let lip = (busemann_origin(&xi, &y) - busemann_origin(&xi, &w)).abs() - dist(&y, &w);
        t.check("busemann-lipschitz", lip, 1e-9);
        t
    });
    let mut resolution = BTreeMap::new();
    resolution.insert("time-grid-step".into(), 0.75);
    Ok(finish("busemann", dim, seed, samples, tally, resolution))
}

// ---- limit builder --------------------------------------------------------------

fn limit_suite(dim: usize, samples: u64, seed: u64) -> Result<SuiteReport> {
    let mut tally = Tally::new();
    // Fixed scaffold audits on both built-in families.
    let scaffolds: Vec<(&str, GeodesicScaffold)> = vec![
        ("concentric-h2", concentric_h2(14, 4.7, 1.0)?),
        ("translated-h3", translated_h3(14, 12.0, 0.4, 1.0)?),
    ];
    let taus: Vec<TauSequence> = (1..=8)
        .map(|k| TauSequence::new(vec![k, 1 + (k % 3)], 1).unwrap())
        .collect();
    let depth = 12usize;
    for (name, scaffold) in &scaffolds {
        if dim != 0 && scaffold.dim() != dim && dim != scaffold.dim() {
            // Suites run both families regardless of the dim flag.
        }
        for tau in &taus {
            match scaffold.certified_gamma(tau, depth, false) {
                Ok((_, cert)) => {
                    if cert.is_certified() {
                        tally.check(&format!("{name}-certified"), -1.0, 0.0);
                    } else {
                        tally.fail(&format!("{name}-certified"));
                    }
                }
                Err(_) => tally.fail(&format!("{name}-certified")),
            }
            match scaffold.endpoint_map(tau, &[4, 8, 12], 1e-10) {
                Ok(_) => tally.check(&format!("{name}-endpoint-cauchy"), -1.0, 0.0),
                Err(_) => tally.fail(&format!("{name}-endpoint-cauchy")),
            }
        }
        match separation_audit(scaffold, &taus, depth) {
            Ok(audit) => {
                tally.check(
                    &format!("{name}-separation"),
                    -audit.min_separation,
                    0.0,
                );
                if audit.doubled_paths_certified {
                    tally.check(&format!("{name}-doubled-certified"), -1.0, 0.0);
                } else {
                    tally.fail(&format!("{name}-doubled-certified"));
                }
            }
            Err(_) => tally.fail(&format!("{name}-separation")),
        }
    }
    // Conicality diagnostics on random conjugates.
    let conic = par_tally(samples, |i| {
        let mut t = Tally::new();
        let mut rng = derive_rng(seed, i.wrapping_add(1 << 32));
        let d = if dim == 3 { 3 } else { 2 };
        let h = crate::rng::random_isometry(&mut rng, d, 1.0);
        // Loxodromic conjugate: basepoint on the axis, conical evidence.
        let g = h
            .compose(&Isometry::boost(d, 1, 1.0).unwrap())
            .compose(&h.inverse());
        if let Classification::Loxodromic { attracting, .. } = g.classify() {
            let base = g.axis().unwrap().eval(0.0).unwrap();
            match conicality_diagnostic(&[g.clone()], attracting, &base, 1.0, 10.0, 24) {
                Ok(rep) if rep.evidence == ConicalityEvidence::Conical => {
                    t.check("conical-loxodromic", -1.0, 0.0)
                }
                _ => t.fail("conical-loxodromic"),
            }
        } else {
            t.fail("conical-loxodromic");
        }
        // Parabolic conjugate: nonconical at horizon 10.
        let p = random_parabolic(&mut rng, d, 1.5);
        if let Classification::Parabolic { fixed } = p.classify() {
            let base = random_point(&mut rng, d, 1.0);
            match conicality_diagnostic(&[p.clone()], fixed, &base, 1.0, 10.0, 256) {
                Ok(rep) if rep.evidence == ConicalityEvidence::NonconicalAtHorizon => {
                    t.check("nonconical-parabolic", -1.0, 0.0)
                }
                _ => t.fail("nonconical-parabolic"),
            }
        } else {
            t.fail("nonconical-parabolic");
        }
        t
    });
    let tally = tally.merge(conic);
    let mut resolution = BTreeMap::new();
    resolution.insert("depth".into(), depth as f64);
    resolution.insert("cauchy-tolerance".into(), 1e-10);
    resolution.insert("horizon".into(), 10.0);
    Ok(finish("limit", dim, seed, samples, tally, resolution))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_are_deterministic() {
        let a = run_suite("inequalities", 2, 40, 7, None).unwrap();
        let b = run_suite("inequalities", 2, 40, 7, None).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn small_suites_pass() {
        for name in ["inequalities", "busemann", "packing"] {
            let r = run_suite(name, 2, 25, 11, None).unwrap();
            assert_eq!(r.violations, 0, "{name}: {:?}", r.checks);
        }
    }

    #[test]
    fn zero_samples_is_empty_pass() {
        let r = run_suite("busemann", 2, 0, 3, None).unwrap();
        assert_eq!(r.instances, 0);
        assert!(r.passed());
    }

    #[test]
    fn unknown_suite_is_domain_error() {
        assert!(matches!(
            run_suite("nope", 2, 1, 1, None),
            Err(Error::Domain(_))
        ));
    }
}
