//! Piecewise-geodesic paths and uniform quasigeodesic certification.
//!
//! A path is stored in "developed" form: segment k is the canonical geodesic
//! from the model origin `o` in the direction of a unit spatial tangent
//! `u_k`, living in its own vertex-anchored frame; frame k+1 is frame k
//! advanced by the translation `S(u_k, len_k)` along segment k. World
//! placement is `anchor * S(u_0, len_0) * ... `. All pair distances are
//! evaluated through chained relative isometries whose entries stay at the
//! scale `e^(true distance)`, so paths hundreds of units long keep full
//! precision where naive Minkowski products between far-apart coordinate
//! vectors would cancel catastrophically.
//!
//! Certification: a path whose edges all have length `>= L(theta) =
//! 2 arccosh(2 / sin(theta/2)) + 1` and whose vertex angles are `>= theta`
//! is a `(2L, 4L+1)`-quasigeodesic; with short edges (length `>= eps`)
//! admitted between long ones at right angles the threshold becomes
//! `L(theta, eps) = 2 arccosh((e^2+1) / (2 sin(alpha/2))) + 1` with
//! `alpha = min(theta, pi/2 - arcsin(1/cosh eps))`, and the constants
//! `(2L, 4L+3)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::{dist, Endpoint, GeodesicSegment};
use crate::hyperplane::{hyperplane_distance, Hyperplane};
use crate::isometry::Isometry;
use crate::minkowski::mink;
use crate::point::{HPoint, IdealPoint};
use crate::tol::ANGLE_TOL;

/// Edge-length threshold for the long-edges certificate.
pub fn long_edge_threshold(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= std::f64::consts::PI) {
        return Err(Error::Domain(format!("theta = {theta} outside (0, pi]")));
    }
    Ok(2.0 * (2.0 / (theta / 2.0).sin()).acosh() + 1.0)
}

/// Edge-length threshold for the mixed long/short certificate.
pub fn mixed_edge_threshold(theta: f64, eps: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= std::f64::consts::PI) {
        return Err(Error::Domain(format!("theta = {theta} outside (0, pi]")));
    }
    if eps <= 0.0 {
        return Err(Error::Domain("eps must be positive".into()));
    }
    let alpha = theta.min(std::f64::consts::FRAC_PI_2 - (1.0 / eps.cosh()).asin());
    let e2 = std::f64::consts::E * std::f64::consts::E;
    Ok(2.0 * ((e2 + 1.0) / (2.0 * (alpha / 2.0).sin())).acosh() + 1.0)
}

/// Translation along the canonical geodesic (origin, u) by distance `t`,
/// as a Lorentz matrix. `u` must be a unit spatial tangent at the origin
/// (time component 0).
pub fn shift(u: &DVector<f64>, t: f64) -> DMatrix<f64> {
    let n = u.len();
    let mut m = DMatrix::identity(n, n);
    let (ch, sh) = (t.cosh(), t.sinh());
    // Block action on span{e0, u}: boost; identity orthogonal to it.
    m[(0, 0)] = ch;
    for i in 1..n {
        m[(0, i)] = sh * u[i];
        m[(i, 0)] = sh * u[i];
        for j in 1..n {
            m[(i, j)] += (ch - 1.0) * u[i] * u[j];
        }
    }
    m
}

/// A chain of geodesic segments sharing endpoints, in developed form.
#[derive(Debug, Clone)]
pub struct PiecewisePath {
    anchor: Isometry,
    /// Unit spatial tangents at the origin, one per segment.
    tangents: Vec<DVector<f64>>,
    /// Segment lengths; only the final one may be infinite (terminal ray).
    lengths: Vec<f64>,
    /// Arclength prefix sums (prefix[k] = start of segment k).
    prefix: Vec<f64>,
}

impl PiecewisePath {
    /// Build from developed data: an anchor frame and (tangent, length)
    /// pairs. Tangents must be unit spatial vectors at the origin.
    pub fn from_turtle(anchor: Isometry, parts: Vec<(DVector<f64>, f64)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Degenerate("path needs at least one segment".into()));
        }
        let n = anchor.dim() + 1;
        let mut tangents = Vec::with_capacity(parts.len());
        let mut lengths = Vec::with_capacity(parts.len());
        for (k, (u, len)) in parts.into_iter().enumerate() {
            if u.len() != n || u[0].abs() > 1e-12 {
                return Err(Error::Model(format!(
                    "segment {k}: tangent must be spatial at the origin"
                )));
            }
            let norm = mink(&u, &u).sqrt();
            if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
                return Err(Error::Model(format!("segment {k}: tangent not unit")));
            }
            if !(len > 0.0) {
                return Err(Error::Degenerate(format!("segment {k}: nonpositive length")));
            }
            if len.is_infinite() {
                tangents.push(u / norm);
                lengths.push(len);
                break; // a terminal ray ends the path
            }
            tangents.push(u / norm);
            lengths.push(len);
        }
        let mut prefix = Vec::with_capacity(lengths.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for l in &lengths {
            acc += l;
            prefix.push(acc);
        }
        Ok(PiecewisePath {
            anchor,
            tangents,
            lengths,
            prefix,
        })
    }

    /// Build from world-coordinate vertices (the JSON surface). Consecutive
    /// vertices must be distinct; only the last vertex may be ideal, giving a
    /// terminal ray. Intended for desk-scale inputs (coordinate radius up to
    /// ~10); longer paths should be built in developed form.
    pub fn from_vertices(vertices: &[Endpoint]) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::Degenerate("need at least two vertices".into()));
        }
        let first = vertices[0]
            .as_interior()
            .ok_or_else(|| Error::Domain("first vertex must be interior".into()))?;
        for (k, v) in vertices.iter().enumerate() {
            if k + 1 < vertices.len() && v.as_interior().is_none() {
                return Err(Error::Domain(format!(
                    "vertex {k}: ideal vertices are only admissible at the end"
                )));
            }
        }
        let dim = first.dim();
        let o = HPoint::origin(dim);
        let anchor = if dist(&o, first) < 1e-12 {
            Isometry::identity(dim)
        } else {
            let g = GeodesicSegment::between(&o, first)?;
            Isometry::translation_along(&g, g.length())
        };
        let mut frame = anchor.clone();
        let mut parts = Vec::new();
        for w in vertices.windows(2) {
            let inv = frame.inverse();
            match &w[1] {
                Endpoint::Interior(v) => {
                    let local = inv.apply(v);
                    let len = dist(&o, &local);
                    if len < 1e-12 {
                        return Err(Error::Degenerate("coincident consecutive vertices".into()));
                    }
                    let u = spatial_direction(local.coords());
                    frame = frame.compose(&Isometry::new_unchecked(shift(&u, len)));
                    parts.push((u, len));
                }
                Endpoint::Ideal(xi) => {
                    let local = inv.apply_ideal(xi);
                    let u = spatial_direction(local.coords());
                    parts.push((u, f64::INFINITY));
                }
            }
        }
        PiecewisePath::from_turtle(anchor, parts)
    }

    pub fn dim(&self) -> usize {
        self.anchor.dim()
    }

    pub fn segment_count(&self) -> usize {
        self.lengths.len()
    }

    pub fn segment_length(&self, k: usize) -> f64 {
        self.lengths[k]
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    /// Total arc length (may be +infinity with a terminal ray).
    pub fn total_length(&self) -> f64 {
        *self.prefix.last().unwrap()
    }

    /// Finite part of the arclength range (excludes a terminal ray).
    pub fn finite_length(&self) -> f64 {
        if self.lengths.last().map(|l| l.is_infinite()).unwrap_or(false) {
            self.prefix[self.prefix.len() - 2]
        } else {
            self.total_length()
        }
    }

    pub fn has_terminal_ray(&self) -> bool {
        self.lengths.last().map(|l| l.is_infinite()).unwrap_or(false)
    }

    pub fn anchor(&self) -> &Isometry {
        &self.anchor
    }

    pub fn tangent(&self, k: usize) -> &DVector<f64> {
        &self.tangents[k]
    }

    /// Interior vertex angles: angle between arcs k and k+1 at their shared
    /// vertex, i.e. `arccos(-<u_k, u_{k+1}>)` in the vertex frame.
    pub fn vertex_angles(&self) -> Vec<f64> {
        self.tangents
            .windows(2)
            .map(|w| {
                let mut dot = 0.0;
                for i in 1..w[0].len() {
                    dot += w[0][i] * w[1][i];
                }
                (-dot).clamp(-1.0, 1.0).acos()
            })
            .collect()
    }

    /// Arclength at the start of segment `k`.
    pub fn prefix_at(&self, k: usize) -> f64 {
        self.prefix[k]
    }

    /// Locate arclength `s` as (segment index, offset into it).
    fn locate(&self, s: f64) -> (usize, f64) {
        let k = match self
            .prefix
            .binary_search_by(|p| p.partial_cmp(&s).unwrap())
        {
            Ok(i) => i.min(self.lengths.len() - 1),
            Err(i) => i.saturating_sub(1).min(self.lengths.len() - 1),
        };
        (k, s - self.prefix[k])
    }

    /// Relative isometry from the point at arclength `s` to the point at
    /// arclength `t` (s <= t), assembled by chaining per-segment advances.
    fn relative(&self, s: f64, t: f64) -> DMatrix<f64> {
        let (i, a) = self.locate(s);
        let (j, b) = self.locate(t);
        if i == j {
            return shift(&self.tangents[i], b - a);
        }
        let mut m = shift(&self.tangents[i], self.lengths[i] - a);
        for k in i + 1..j {
            m *= shift(&self.tangents[k], self.lengths[k]);
        }
        m *= shift(&self.tangents[j], b);
        m
    }

    /// Distance between the path points at arclengths `s` and `t`.
    pub fn pair_distance(&self, s: f64, t: f64) -> f64 {
        let (s, t) = if s <= t { (s, t) } else { (t, s) };
        let m = self.relative(s, t);
        m[(0, 0)].max(1.0).acosh()
    }

    /// World coordinates of the point at arclength `s`. Far points overflow
    /// the naive coordinate representation; prefer the relative kernels.
    pub fn point_world(&self, s: f64) -> Result<HPoint> {
        let (j, b) = self.locate(s);
        let mut m = self.anchor.matrix().clone();
        for k in 0..j {
            m *= shift(&self.tangents[k], self.lengths[k]);
        }
        m *= shift(&self.tangents[j], b);
        HPoint::from_timelike(m.column(0).into_owned())
    }

    /// Normalized boundary direction of the point at arclength `s`, viewed
    /// from the world origin.
    pub fn ideal_direction(&self, s: f64) -> Result<IdealPoint> {
        let (j, b) = self.locate(s);
        let mut m = self.anchor.matrix().clone();
        for k in 0..j {
            m *= shift(&self.tangents[k], self.lengths[k]);
        }
        m *= shift(&self.tangents[j], b);
        IdealPoint::from_null(m.column(0).into_owned())
    }

    /// World vertices (desk-scale use: JSON export, small paths).
    pub fn vertices_world(&self) -> Vec<Endpoint> {
        let mut out = Vec::with_capacity(self.lengths.len() + 1);
        let mut frame = self.anchor.clone();
        out.push(Endpoint::Interior(
            HPoint::from_timelike(frame.matrix().column(0).into_owned()).expect("anchor vertex"),
        ));
        for (u, l) in self.tangents.iter().zip(&self.lengths) {
            if l.is_infinite() {
                let v = frame.matrix() * (DVector::from_fn(u.len(), |i, _| {
                    if i == 0 {
                        1.0
                    } else {
                        u[i]
                    }
                }));
                out.push(Endpoint::Ideal(
                    IdealPoint::from_null(v).expect("ray direction"),
                ));
                break;
            }
            frame = frame.compose(&Isometry::new_unchecked(shift(u, *l)));
            out.push(Endpoint::Interior(
                HPoint::from_timelike(frame.matrix().column(0).into_owned()).expect("vertex"),
            ));
        }
        out
    }

    /// Repartition pass: edges of length >= 2L are cut into pieces of length
    /// L with a final piece in [L, 2L); inserted vertices are straight
    /// (angle pi). The path as a map is unchanged.
    pub fn repartition(&self, level: f64) -> PiecewisePath {
        let mut parts = Vec::new();
        for (u, l) in self.tangents.iter().zip(&self.lengths) {
            let mut rest = *l;
            if rest.is_finite() {
                while rest >= 2.0 * level {
                    parts.push((u.clone(), level));
                    rest -= level;
                }
            }
            parts.push((u.clone(), rest));
        }
        PiecewisePath::from_turtle(self.anchor.clone(), parts).expect("repartition of valid path")
    }

    /// Concatenation of `self` and `other` when `other`'s anchor continues
    /// this path's final frame (builder use).
    pub fn extended_with(&self, parts: Vec<(DVector<f64>, f64)>) -> Result<PiecewisePath> {
        let mut all: Vec<(DVector<f64>, f64)> = self
            .tangents
            .iter()
            .cloned()
            .zip(self.lengths.iter().cloned())
            .collect();
        all.extend(parts);
        PiecewisePath::from_turtle(self.anchor.clone(), all)
    }
}

fn spatial_direction(v: &DVector<f64>) -> DVector<f64> {
    let mut u = v.clone();
    u[0] = 0.0;
    let n = u.norm();
    u / n
}

impl Isometry {
    /// Internal fast-path constructor for matrices built by exact recipes
    /// (shifts, rotations); skips the Lorentz residual check.
    pub(crate) fn new_unchecked(matrix: DMatrix<f64>) -> Isometry {
        Isometry::new(matrix).expect("constructed matrix is Lorentz")
    }
}

// ---- certification -------------------------------------------------------

/// Certificate mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertMode {
    Long,
    LongShort,
}

/// Hypothesis verdict carried by a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "tag")]
pub enum Hypothesis {
    LongEdges,
    LongShort,
    Failed { index: usize, reason: String },
}

/// One hypothesis check in the certificate ledger.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub kind: String,
    pub index: usize,
    pub value: f64,
    pub required: f64,
    pub ok: bool,
}

/// Quasigeodesic constants plus the hypothesis ledger that justified them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QGCertificate {
    pub lambda: f64,
    pub alpha: f64,
    pub hypothesis: Hypothesis,
    pub ledger: Vec<LedgerEntry>,
    /// (lambda, alpha) estimated from sampled parameter pairs.
    pub measured: (f64, f64),
}

impl QGCertificate {
    pub fn is_certified(&self) -> bool {
        !matches!(self.hypothesis, Hypothesis::Failed { .. })
    }
}

/// Verify the hypotheses of the matching proposition edge-by-edge and
/// vertex-by-vertex; on success return the certified constants `(2L, 4L+1)`
/// (long mode) or `(2L, 4L+3)` (mixed mode) together with measured constants
/// from sampled parameter pairs. Hypothesis violations yield a certificate
/// tagged `Failed` at the offending index.
pub fn certify(path: &PiecewisePath, mode: CertMode, theta: f64, eps: f64) -> Result<QGCertificate> {
    let level = match mode {
        CertMode::Long => long_edge_threshold(theta)?,
        CertMode::LongShort => mixed_edge_threshold(theta, eps)?,
    };
    let angles = path.vertex_angles();
    let mut ledger = Vec::new();
    let mut failure: Option<(usize, String)> = None;

    let long = |l: f64| l >= level - 1e-9;
    match mode {
        CertMode::Long => {
            for (k, l) in path.lengths().iter().enumerate() {
                let ok = long(*l);
                ledger.push(LedgerEntry {
                    kind: "edge-length".into(),
                    index: k,
                    value: *l,
                    required: level,
                    ok,
                });
                if !ok && failure.is_none() {
                    failure = Some((k, format!("edge {k} shorter than L = {level:.4}")));
                }
            }
            for (k, a) in angles.iter().enumerate() {
                let ok = *a >= theta - ANGLE_TOL;
                ledger.push(LedgerEntry {
                    kind: "vertex-angle".into(),
                    index: k + 1,
                    value: *a,
                    required: theta,
                    ok,
                });
                if !ok && failure.is_none() {
                    failure = Some((k + 1, format!("angle at vertex {} below theta", k + 1)));
                }
            }
        }
        CertMode::LongShort => {
            let m = path.segment_count();
            for (k, l) in path.lengths().iter().enumerate() {
                let is_long = long(*l);
                let is_short_ok = *l >= eps - 1e-9;
                ledger.push(LedgerEntry {
                    kind: if is_long { "edge-long" } else { "edge-short" }.into(),
                    index: k,
                    value: *l,
                    required: if is_long { level } else { eps },
                    ok: is_long || is_short_ok,
                });
                if !is_long {
                    if !is_short_ok && failure.is_none() {
                        failure = Some((k, format!("edge {k} shorter than eps")));
                    }
                    // Short edges need long neighbors on both sides, met at
                    // right angles.
                    if (k == 0 || k + 1 == m) && failure.is_none() {
                        failure = Some((k, format!("terminal edge {k} is short")));
                    } else if k > 0 && k + 1 < m {
                        if !long(path.segment_length(k - 1)) || !long(path.segment_length(k + 1)) {
                            if failure.is_none() {
                                failure =
                                    Some((k, format!("short edge {k} lacks long neighbors")));
                            }
                        }
                        for (vk, va) in [(k, angles[k - 1]), (k + 1, angles[k])] {
                            let ok = va >= std::f64::consts::FRAC_PI_2 - ANGLE_TOL;
                            ledger.push(LedgerEntry {
                                kind: "short-edge-angle".into(),
                                index: vk,
                                value: va,
                                required: std::f64::consts::FRAC_PI_2,
                                ok,
                            });
                            if !ok && failure.is_none() {
                                failure = Some((vk, "short edge meets neighbor below pi/2".into()));
                            }
                        }
                    }
                }
            }
            // Angles between pairs of long edges obey theta.
            for k in 0..angles.len() {
                if long(path.segment_length(k)) && long(path.segment_length(k + 1)) {
                    let ok = angles[k] >= theta - ANGLE_TOL;
                    ledger.push(LedgerEntry {
                        kind: "vertex-angle".into(),
                        index: k + 1,
                        value: angles[k],
                        required: theta,
                        ok,
                    });
                    if !ok && failure.is_none() {
                        failure = Some((k + 1, format!("angle at vertex {} below theta", k + 1)));
                    }
                }
            }
        }
    }

    let (lambda, alpha) = match mode {
        CertMode::Long => (2.0 * level, 4.0 * level + 1.0),
        CertMode::LongShort => (2.0 * level, 4.0 * level + 3.0),
    };
    let measured = measure_constants(path, 1000);

    let hypothesis = match failure {
        Some((index, reason)) => Hypothesis::Failed { index, reason },
        None => match mode {
            CertMode::Long => Hypothesis::LongEdges,
            CertMode::LongShort => Hypothesis::LongShort,
        },
    };
    Ok(QGCertificate {
        lambda,
        alpha,
        hypothesis,
        ledger,
        measured,
    })
}

/// Estimate quasigeodesic constants from `count` deterministic
/// (low-discrepancy) parameter pairs: the multiplicative constant is the
/// worst arclength/distance ratio over pairs at distance >= 1, and the
/// additive constant is the residual at that slope.
pub fn measure_constants(path: &PiecewisePath, count: usize) -> (f64, f64) {
    let total = path.finite_length();
    if total <= 0.0 || path.segment_count() == 0 {
        return (1.0, 0.0);
    }
    let pairs = kronecker_pairs(total, count);
    let mut lambda: f64 = 1.0;
    let mut samples = Vec::with_capacity(pairs.len());
    for (s, t) in pairs {
        let d = path.pair_distance(s, t);
        samples.push(((t - s).abs(), d));
        if d >= 1.0 {
            lambda = lambda.max((t - s).abs() / d);
        }
    }
    let mut alpha: f64 = 0.0;
    for (sep, d) in samples {
        alpha = alpha.max(sep / lambda - d);
    }
    (lambda, alpha)
}

fn kronecker_pairs(total: f64, count: usize) -> Vec<(f64, f64)> {
    // 2D Kronecker sequence with the plastic-number constants; deterministic
    // and well spread.
    const A1: f64 = 0.7548776662466927;
    const A2: f64 = 0.5698402909980532;
    let mut out = Vec::with_capacity(count);
    let mut x = 0.5;
    let mut y = 0.25;
    for _ in 0..count {
        x = (x + A1) % 1.0;
        y = (y + A2) % 1.0;
        let s = x * total;
        let t = y * total;
        if (s - t).abs() > 1e-9 {
            out.push(if s < t { (s, t) } else { (t, s) });
        }
    }
    out
}

/// Distances between perpendicular bisectors of consecutive edges, after the
/// repartition pass at the long-edge threshold for `theta`. For a certified
/// long-edges path every gap is at least 1. Gaps are computed by alternating
/// projection between the two bisector hyperplanes in the shared-vertex
/// frame.
pub fn bisector_gap_check(path: &PiecewisePath, theta: f64) -> Result<Vec<f64>> {
    let level = long_edge_threshold(theta)?;
    let cert = certify(path, CertMode::Long, theta, 1.0)?;
    if !cert.is_certified() {
        return Err(Error::Precondition(
            "bisector gaps require the long-edges hypotheses".into(),
        ));
    }
    let rp = path.repartition(level);
    let n = path.dim() + 1;
    let o = HPoint::origin(path.dim());
    let mut gaps = Vec::new();
    for k in 0..rp.segment_count().saturating_sub(1) {
        if !rp.segment_length(k).is_finite() || !rp.segment_length(k + 1).is_finite() {
            break;
        }
        // Shared-vertex frame: previous segment start sits at parameter
        // -len_k along u_k, next segment end at +len_{k+1} along u_{k+1}.
        let a = HPoint::from_timelike(
            shift(&rp.tangents[k], -rp.segment_length(k))
                .column(0)
                .into_owned(),
        )?;
        let b = HPoint::from_timelike(
            shift(&rp.tangents[k + 1], rp.segment_length(k + 1))
                .column(0)
                .into_owned(),
        )?;
        let _ = n;
        let h1 = Hyperplane::bisector(&a, &o)?;
        let h2 = Hyperplane::bisector(&o, &b)?;
        gaps.push(hyperplane_distance(&h1, &h2, &o));
    }
    Ok(gaps)
}

// ---- ideal endpoints ------------------------------------------------------

/// Supplier of developed segments for (possibly infinite) paths.
pub trait SegmentSource {
    fn dim(&self) -> usize;
    fn anchor(&self) -> Isometry;
    /// Segment k as (unit tangent at origin, length); `None` when the path
    /// is exhausted. Must be re-entrant: the same k yields the same segment.
    fn segment(&self, k: usize) -> Option<(DVector<f64>, f64)>;
}

impl SegmentSource for PiecewisePath {
    fn dim(&self) -> usize {
        PiecewisePath::dim(self)
    }

    fn anchor(&self) -> Isometry {
        self.anchor.clone()
    }

    fn segment(&self, k: usize) -> Option<(DVector<f64>, f64)> {
        if k < self.segment_count() {
            Some((self.tangents[k].clone(), self.lengths[k]))
        } else {
            None
        }
    }
}

/// Cauchy extrapolation record for an ideal endpoint.
#[derive(Debug, Clone)]
pub struct CauchyReport {
    /// (arclength, boundary direction) extrapolants.
    pub samples: Vec<(f64, IdealPoint)>,
    /// Spherical gap between the final two extrapolants.
    pub final_gap: f64,
}

/// Extrapolate the ideal endpoint of a certified path by normalizing path
/// points at arclengths `base^k`; converges once consecutive normalized
/// points differ by less than `tol` in spherical distance. The certificate
/// gate exists because uncertified paths need not converge to a boundary
/// point.
pub fn ideal_endpoint(
    source: &dyn SegmentSource,
    cert: &QGCertificate,
    base: f64,
    tol: f64,
) -> Result<(IdealPoint, CauchyReport)> {
    if !cert.is_certified() {
        return Err(Error::Precondition(
            "ideal endpoint requires a valid certificate".into(),
        ));
    }
    if base <= 1.0 {
        return Err(Error::Domain("schedule base must exceed 1".into()));
    }
    let mut frame = source.anchor().matrix().clone();
    let mut used = 0.0_f64; // arclength materialized into `frame`
    let mut k_seg = 0usize;
    let mut current = source.segment(k_seg);
    let mut samples: Vec<(f64, IdealPoint)> = Vec::new();
    let mut shifted: Vec<IdealPoint> = Vec::new();
    // Second reference frame, displaced orthogonally to the first tangent:
    // directions from a single viewpoint agree spuriously when an initial
    // leg runs radially through it, but never from both viewpoints at once.
    let offset_frame = {
        let (u0, _) = source
            .segment(0)
            .ok_or_else(|| Error::Degenerate("empty path".into()))?;
        let mut w = DVector::zeros(u0.len());
        let pick = (1..u0.len()).min_by(|a, b| {
            u0[*a].abs().partial_cmp(&u0[*b].abs()).unwrap()
        });
        w[pick.unwrap_or(1)] = 1.0;
        let w = &w - &u0 * u0.dot(&w);
        let n = w.norm();
        let w = if n > 1e-6 { w / n } else { u0.clone() };
        shift(&w, 1.0)
    };
    let offset_inv = {
        let j = crate::minkowski::j_matrix(offset_frame.nrows());
        &j * offset_frame.transpose() * &j
    };
    let mut t = 1.0_f64;
    let mut remaining_in_seg = current.as_ref().map(|(_, l)| *l).unwrap_or(0.0);
    let max_t = 600.0;
    while t < max_t {
        // Advance the frame to arclength t.
        let mut need = t - used;
        loop {
            let Some((u, _len)) = current.clone() else {
                // Path exhausted before reaching t.
                return Err(Error::Inconclusive(format!(
                    "path ends at arclength {used:.3} before extrapolation step {t:.0}"
                )));
            };
            if need <= remaining_in_seg {
                frame *= shift(&u, need);
                remaining_in_seg -= need;
                used = t;
                break;
            }
            if remaining_in_seg.is_infinite() {
                frame *= shift(&u, need);
                used = t;
                break;
            }
            frame *= shift(&u, remaining_in_seg);
            used += remaining_in_seg;
            need -= remaining_in_seg;
            k_seg += 1;
            current = source.segment(k_seg);
            remaining_in_seg = current.as_ref().map(|(_, l)| *l).unwrap_or(0.0);
        }
        let xi = IdealPoint::from_null(frame.column(0).into_owned())?;
        samples.push((t, xi.clone()));
        shifted.push(IdealPoint::from_null(&offset_inv * frame.column(0))?);
        if samples.len() >= 2 {
            let k = samples.len();
            let gap = samples[k - 2].1.spherical_distance(&samples[k - 1].1);
            let gap2 = shifted[k - 2].spherical_distance(&shifted[k - 1]);
            if gap < tol && gap2 < tol {
                let report = CauchyReport {
                    final_gap: gap,
                    samples,
                };
                return Ok((xi, report));
            }
        }
        t *= base;
        if frame.amax() > 1e280 {
            // The frame scale is e^t; stop before overflow.
            break;
        }
    }
    Err(Error::Inconclusive(
        "extrapolation did not reach the Cauchy tolerance".into(),
    ))
}

// ---- Morse fellow traveling ------------------------------------------------

/// Two-sided Hausdorff distance between a finite path and the geodesic chord
/// joining its endpoints, measured by dense sampling at `resolution`. The
/// sweep keeps a running relative isometry between chord and path frames so
/// precision is independent of the path's distance from the origin.
pub fn morse_fellow_travel(path: &PiecewisePath, resolution: f64) -> Result<f64> {
    if path.has_terminal_ray() {
        return Err(Error::Domain(
            "fellow-travel measurement needs a finite path".into(),
        ));
    }
    let total = path.total_length();
    if path.segment_count() == 1 {
        return Ok(0.0);
    }
    // Chord data in the path-start frame: direction and length.
    let rel = path.relative(0.0, total);
    let chord_len = rel[(0, 0)].max(1.0).acosh();
    if chord_len < 1e-9 {
        return Err(Error::Degenerate("path endpoints coincide".into()));
    }
    let chord_dir = spatial_direction(&rel.column(0).into_owned());

    // sup over path samples of d(sample, chord). The reference chord
    // window slides to stay at the nearest chord point, so the relative
    // matrix keeps bounded entries (anchoring at the chord start would
    // cancel e^(2 distance)-sized products).
    let mut sup_path = 0.0_f64;
    {
        let n = path.dim() + 1;
        let mut m = DMatrix::<f64>::identity(n, n);
        let mut w = 0.0_f64; // chord parameter of the sliding window
        let steps = (total / resolution).ceil() as usize;
        let ds = total / steps as f64;
        let mut seg = 0usize;
        let mut off = 0.0;
        for step_i in 0..=steps {
            if step_i % 64 == 63 {
                lorentz_orthonormalize(&mut m);
            }
            let p = m.column(0);
            let a = p[0];
            let mut b = 0.0;
            for i in 1..n {
                b += p[i] * chord_dir[i];
            }
            let t_star = (b / a).atanh().clamp(-w, chord_len - w);
            let d = (a * t_star.cosh() - b * t_star.sinh()).max(1.0).acosh();
            sup_path = sup_path.max(d);
            if t_star.abs() > 1e-12 {
                m = shift(&chord_dir, -t_star) * m;
                w += t_star;
            }
            // advance the path sample
            let mut step = ds;
            while step > 0.0 && seg < path.segment_count() {
                let room = path.segment_length(seg) - off;
                if step < room {
                    m *= shift(&path.tangents[seg], step);
                    off += step;
                    step = 0.0;
                } else {
                    m *= shift(&path.tangents[seg], room);
                    seg += 1;
                    off = 0.0;
                    step -= room;
                }
            }
        }
    }

    // sup over chord samples of d(sample, path). A two-pointer sweep: the
    // relative matrix stays anchored at the tracked nearest path position,
    // which fellow-traveling keeps within bounded distance of the chord
    // sample, so entries never outgrow the cancellation budget.
    let mut sup_chord = 0.0_f64;
    {
        let n_dim = path.dim() + 1;
        let steps = (chord_len / resolution).ceil() as usize;
        let dt = chord_len / steps as f64;
        // n = (chord sample frame)^-1 * (path frame at the window anchor).
        let mut n_mat = DMatrix::<f64>::identity(n_dim, n_dim);
        let mut seg = 0usize;
        let mut off = 0.0_f64;
        let back = shift(&chord_dir, -dt);
        for step_i in 0..=steps {
            if step_i % 64 == 63 {
                lorentz_orthonormalize(&mut n_mat);
            }
            // Re-anchor at the argmin foot within the window; iterate so the
            // anchor can cross several segments when the foot hops a corner.
            let mut d = f64::INFINITY;
            for _ in 0..8 {
                let (dd, fs, fo) = local_nearest(path, &n_mat, seg, off);
                d = dd;
                let delta = (path.prefix_at(fs) + fo) - (path.prefix_at(seg) + off);
                if delta.abs() < 1e-12 {
                    break;
                }
                advance_on_path(path, &mut n_mat, &mut seg, &mut off, delta);
            }
            if std::env::var("DBG_TRACK").is_ok() && step_i % 100 == 0 {
                eprintln!("DBG6 t={:.2} arc={:.2} d={d:.4}", step_i as f64 * dt, path.prefix_at(seg) + off);
            }
            sup_chord = sup_chord.max(d);
            n_mat = &back * n_mat;
        }
    }

    Ok(sup_path.max(sup_chord))
}


/// Minkowski Gram-Schmidt: project a near-Lorentz matrix back onto the
/// group. Long telescoping sweeps amplify the non-group error component
/// exponentially (boost dynamics), so kernels re-project periodically.
fn lorentz_orthonormalize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    // Column 0: timelike, normalize to <c,c> = -1.
    let mut c0 = m.column(0).into_owned();
    let q0 = crate::minkowski::mink_norm2(&c0);
    if q0 < 0.0 {
        c0 /= (-q0).sqrt();
        m.set_column(0, &c0);
    }
    for j in 1..n {
        let mut cj = m.column(j).into_owned();
        // Subtract the timelike projection, then earlier spacelike ones.
        let t = crate::minkowski::mink(&cj, &c0);
        cj += &c0 * t;
        for k in 1..j {
            let ck = m.column(k).into_owned();
            let s = crate::minkowski::mink(&cj, &ck);
            cj -= &ck * s;
        }
        let qj = crate::minkowski::mink_norm2(&cj);
        if qj > 0.0 {
            cj /= qj.sqrt();
        }
        m.set_column(j, &cj);
    }
}

/// Distance from the origin to the segment (origin, u, len) seen through the
/// relative isometry `m` (sample-frame^-1 * segment-start-frame).
fn origin_to_segment(m: &DMatrix<f64>, u: &DVector<f64>, len: f64) -> f64 {
    // d(o, m seg(t)): cosh = cosh t * m00 + sinh t * (m u)_0; chord_min
    // minimizes a cosh t - b sinh t, so the sinh coefficient flips sign.
    let a = m[(0, 0)];
    let mut b = 0.0;
    for c in 0..u.len() {
        b += m[(0, c)] * u[c];
    }
    chord_min(a, -b, len.min(1e6))
}

/// Advance a (segment, offset) path position together with its relative
/// frame by signed arclength `delta`; false when the path ends.
fn advance_on_path(
    path: &PiecewisePath,
    n: &mut DMatrix<f64>,
    seg: &mut usize,
    off: &mut f64,
    delta: f64,
) -> bool {
    let mut rest = delta;
    while rest.abs() > 1e-15 {
        if rest > 0.0 {
            let room = path.segment_length(*seg) - *off;
            if rest < room {
                *n *= shift(&path.tangents[*seg], rest);
                *off += rest;
                return true;
            }
            if *seg + 1 >= path.segment_count() {
                *n *= shift(&path.tangents[*seg], room);
                *off += room;
                return false;
            }
            *n *= shift(&path.tangents[*seg], room);
            *seg += 1;
            *off = 0.0;
            rest -= room;
        } else {
            if *off + rest >= 0.0 {
                *n *= shift(&path.tangents[*seg], rest);
                *off += rest;
                return true;
            }
            if *seg == 0 {
                *n *= shift(&path.tangents[0], -*off);
                *off = 0.0;
                return false;
            }
            *n *= shift(&path.tangents[*seg], -*off);
            rest += *off;
            *seg -= 1;
            *off = path.segment_length(*seg);
        }
    }
    true
}

/// Distance and argmin foot (segment, offset) from the origin of the sample
/// frame to the path segments within two of the window anchor, through
/// bounded-entry relative frames.
fn local_nearest(
    path: &PiecewisePath,
    n: &DMatrix<f64>,
    seg: usize,
    off: f64,
) -> (f64, usize, f64) {
    let mut best = (f64::INFINITY, seg, off);
    // Walk back to the start of segment max(seg-2, 0).
    let k0 = seg.saturating_sub(2);
    let mut m = n * shift(&path.tangents[seg], -off);
    let mut k = seg;
    while k > k0 {
        k -= 1;
        m *= shift(&path.tangents[k], -path.segment_length(k));
    }
    let k1 = (seg + 2).min(path.segment_count() - 1);
    for kk in k0..=k1 {
        let len = path.segment_length(kk).min(1e6);
        let u = &path.tangents[kk];
        let a = m[(0, 0)];
        let mut b = 0.0;
        for c in 0..u.len() {
            b += m[(0, c)] * u[c];
        }
        let t_star = (-b / a).atanh().clamp(0.0, len);
        let d = (a * t_star.cosh() + b * t_star.sinh()).max(1.0).acosh();
        if d < best.0 {
            best = (d, kk, t_star);
        }
        m *= shift(u, path.segment_length(kk));
    }
    best
}

/// Minimize `t -> arccosh(a cosh t - b sinh t)` over `[0, len]`
/// (a >= 1 >= |b/a| by the timelike-section argument).
fn chord_min(a: f64, b: f64, len: f64) -> f64 {
    let t_star = (b / a).atanh();
    let t = t_star.clamp(0.0, len);
    (a * t.cosh() - b * t.sinh()).max(1.0).acosh()
}
