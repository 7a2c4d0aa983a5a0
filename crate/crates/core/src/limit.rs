//! Scaffolds of escaping geodesics and the tau-indexed family of
//! quasigeodesic rays whose ideal endpoints realize nonconical limit points.
//!
//! A scaffold is a chain of loxodromic axes with pairwise connectors (common
//! perpendiculars). To stay numerically sound at arbitrary depth, every axis
//! is stored in its own local frame together with a transition isometry to
//! the previous frame, and the path builder walks a local cursor that is
//! deck-reduced after every wrap. Paths are emitted in developed (turtle)
//! form, so certification and endpoint extrapolation inherit the stable
//! chained-product kernels.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geodesic::{dist, project_to_geodesic, GeodesicSegment};
use crate::isometry::{Classification, Isometry};
use crate::perpendicular::common_perpendicular;
use crate::point::{HPoint, IdealPoint};
use crate::quasigeodesic::{
    certify, ideal_endpoint, long_edge_threshold, shift, CertMode, PiecewisePath, QGCertificate,
};

/// A sequence of positive wrap counts: explicit prefix entries plus a
/// constant tail rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauSequence {
    entries: Vec<u32>,
    tail: u32,
}

impl TauSequence {
    pub fn new(entries: Vec<u32>, tail: u32) -> Result<Self> {
        if tail == 0 || entries.iter().any(|t| *t == 0) {
            return Err(Error::Domain("tau entries must be positive".into()));
        }
        Ok(TauSequence { entries, tail })
    }

    pub fn constant(tail: u32) -> Result<Self> {
        Self::new(Vec::new(), tail)
    }

    /// Parse a comma-separated prefix such as "1,2,1,3" (tail defaults to 1).
    pub fn parse(text: &str) -> Result<Self> {
        let entries: Vec<u32> = text
            .split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("bad tau entry: {e}")))?;
        Self::new(entries, 1)
    }

    pub fn entry(&self, i: usize) -> u32 {
        self.entries.get(i).copied().unwrap_or(self.tail)
    }

    pub fn prefix(&self, depth: usize) -> Vec<u32> {
        (0..depth).map(|i| self.entry(i)).collect()
    }
}

/// Chain of loxodromic axes with connectors; per-axis local frames.
pub struct GeodesicScaffold {
    dim: usize,
    /// Start point, in axis-1 local coordinates (the scaffold's reference
    /// frame for all emitted paths and endpoints).
    basepoint: HPoint,
    /// Local generators: generator i in axis-i coordinates.
    local_generators: Vec<Isometry>,
    /// Frame transitions: T_i maps axis-(i+1) coordinates into axis-i
    /// coordinates; length = generators - 1.
    transitions: Vec<Isometry>,
    /// Long-edge threshold L that every connector and wrap must exceed.
    threshold: f64,
    // Derived data, all in per-axis local coordinates.
    axes: Vec<GeodesicSegment>,
    lengths: Vec<f64>,
    wraps: Vec<u32>,
    entry_params: Vec<f64>,
    exit_params: Vec<f64>,
    offsets: Vec<f64>,
    connector_lengths: Vec<f64>,
}

impl GeodesicScaffold {
    /// Assemble and validate a scaffold. `transitions[i]` re-expresses axis
    /// i+2's local data in axis i+1's coordinates; world-coordinate
    /// scaffolds pass identity transitions.
    pub fn new(
        basepoint: HPoint,
        local_generators: Vec<Isometry>,
        transitions: Vec<Isometry>,
        theta_threshold: f64,
    ) -> Result<Self> {
        let dim = basepoint.dim();
        if local_generators.is_empty() {
            return Err(Error::Build {
                index: 0,
                reason: "no generators".into(),
            });
        }
        if transitions.len() + 1 != local_generators.len() {
            return Err(Error::Build {
                index: 0,
                reason: "need one transition per consecutive axis pair".into(),
            });
        }
        let mut axes = Vec::new();
        let mut lengths = Vec::new();
        let mut wraps = Vec::new();
        for (i, g) in local_generators.iter().enumerate() {
            if g.dim() != dim {
                return Err(Error::Build {
                    index: i,
                    reason: "generator dimension mismatch".into(),
                });
            }
            match g.classify() {
                Classification::Loxodromic { length, .. } => {
                    let axis = g.axis()?;
                    // Orientation sanity: g moves axis points forward by l.
                    let p = axis.eval(0.0)?;
                    let fwd = axis.eval(*length)?;
                    if dist(&g.apply(&p), &fwd) > 1e-6 {
                        return Err(Error::Build {
                            index: i,
                            reason: "generator does not translate its axis forward".into(),
                        });
                    }
                    lengths.push(*length);
                    let m = (theta_threshold / *length).floor() as u32 + 1;
                    wraps.push(m);
                    axes.push(axis);
                }
                c => {
                    return Err(Error::Build {
                        index: i,
                        reason: format!("generator is {}, need loxodromic", c.name()),
                    })
                }
            }
        }
        // Connectors between consecutive axes, in the earlier axis' frame.
        let mut entry_params = vec![0.0; axes.len()];
        let mut exit_params = vec![0.0; axes.len()];
        let mut connector_lengths = vec![0.0; axes.len()];
        let (foot0, mu0) = project_to_geodesic(&basepoint, &axes[0].extended())?;
        if mu0 < theta_threshold - 1e-9 {
            return Err(Error::Build {
                index: 0,
                reason: format!("basepoint only {mu0:.3} from the first axis (need {theta_threshold:.3})"),
            });
        }
        connector_lengths[0] = mu0;
        entry_params[0] = axes[0].extended().foot_parameter(&foot0);
        for i in 0..axes.len() - 1 {
            let other = transform_geodesic(&transitions[i], &axes[i + 1]);
            let seg = common_perpendicular(&axes[i].extended(), &other.extended()).map_err(|e| {
                Error::Build {
                    index: i + 1,
                    reason: format!("no connector between axes {i} and {}: {e}", i + 1),
                }
            })?;
            if seg.length() < theta_threshold - 1e-9 {
                return Err(Error::Build {
                    index: i + 1,
                    reason: format!(
                        "axes {i} and {} only {:.3} apart (need {theta_threshold:.3})",
                        i + 1,
                        seg.length()
                    ),
                });
            }
            let start = seg.point_at(0.0)?;
            let end = seg.point_at(seg.length())?;
            exit_params[i] = axes[i].extended().foot_parameter(&start);
            let end_local = transitions[i].inverse().apply(&end);
            entry_params[i + 1] = axes[i + 1].extended().foot_parameter(&end_local);
            connector_lengths[i + 1] = seg.length();
        }
        let last = axes.len() - 1;
        exit_params[last] = entry_params[last];
        let offsets: Vec<f64> = (0..axes.len())
            .map(|i| (exit_params[i] - entry_params[i]).rem_euclid(lengths[i]))
            .collect();
        Ok(GeodesicScaffold {
            dim,
            basepoint,
            local_generators,
            transitions,
            threshold: theta_threshold,
            axes,
            lengths,
            wraps,
            entry_params,
            exit_params,
            offsets,
            connector_lengths,
        })
    }

    /// Desk-scale scaffold from world-coordinate generators.
    pub fn from_world(basepoint: HPoint, generators: Vec<Isometry>) -> Result<Self> {
        let l = long_edge_threshold(std::f64::consts::FRAC_PI_2)?;
        let n = generators.len();
        let dim = basepoint.dim();
        Self::new(
            basepoint,
            generators,
            vec![Isometry::identity(dim); n.saturating_sub(1)],
            l,
        )
    }

    pub fn axis_count(&self) -> usize {
        self.axes.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn translation_lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn wrap_counts(&self) -> &[u32] {
        &self.wraps
    }

    pub fn connector_lengths(&self) -> &[f64] {
        &self.connector_lengths
    }

    /// Distance from the basepoint to connector `i` (0-based: connector 0
    /// joins axes 1 and 2), measured by accumulating the base through the
    /// frame transitions. Grows without bound on escaping scaffolds.
    pub fn base_to_connector_distance(&self, i: usize) -> Result<f64> {
        if i + 1 >= self.axes.len() {
            return Err(Error::Domain("connector index out of range".into()));
        }
        // Accumulate the basepoint through the frame transitions as raw
        // coordinates; the distance to a near-origin foot only needs the
        // pairing <base, foot>, which stays accurate at any scale.
        let mut base = self.basepoint.coords().clone();
        for t in &self.transitions[..=i] {
            let inv = t.inverse();
            base = inv.matrix() * base;
        }
        let foot = self.axes[i + 1].extended().eval(self.entry_params[i + 1])?;
        Ok((-crate::minkowski::mink(&base, foot.coords())).max(1.0).acosh())
    }

    /// The gamma-path for `tau` with `depth` wrapped axes (depth 0 gives the
    /// initial connector only). The path lives in axis-1 coordinates.
    pub fn build_gamma(&self, tau: &TauSequence, depth: usize) -> Result<PiecewisePath> {
        self.build_inner(tau, depth, false)
    }

    /// As [`build_gamma`], extended by the terminal ray along the final
    /// wrapped axis; this is the deepening family whose endpoints converge
    /// to the tau-endpoint.
    pub fn build_gamma_ray(&self, tau: &TauSequence, depth: usize) -> Result<PiecewisePath> {
        self.build_inner(tau, depth, true)
    }

    fn build_inner(&self, tau: &TauSequence, depth: usize, ray: bool) -> Result<PiecewisePath> {
        if depth > self.axes.len() {
            return Err(Error::Build {
                index: depth,
                reason: format!("depth {depth} exceeds {} axes", self.axes.len()),
            });
        }
        let o = HPoint::origin(self.dim);
        let anchor = if dist(&o, &self.basepoint) < 1e-12 {
            Isometry::identity(self.dim)
        } else {
            let g = GeodesicSegment::between(&o, &self.basepoint)?;
            Isometry::translation_along(&g, g.length())
        };
        let mut cursor = anchor.matrix().clone();
        let mut parts: Vec<(DVector<f64>, f64)> = Vec::new();
        let span = depth.max(1).min(self.axes.len());
        for i in 0..span {
            // Connector into axis i (mu_{i-1}; mu_0 from the basepoint).
            let f_in = self.axes[i].extended().eval(self.entry_params[i])?;
            let inv = lorentz_inverse(&cursor);
            let here = HPoint::from_timelike(cursor.column(0).into_owned())?;
            let len = dist(&here, &f_in);
            let u = spatial_dir(&(&inv * f_in.coords()));
            parts.push((u.clone(), len));
            cursor *= shift(&u, len);

            if depth == 0 {
                break;
            }

            // Wrap along axis i.
            let inv = lorentz_inverse(&cursor);
            let w = axis_tangent(&self.axes[i], self.entry_params[i]);
            let u = spatial_dir(&(&inv * w));
            let t_i = tau.entry(i) as f64;
            let total = t_i * self.wraps[i] as f64 * self.lengths[i] + self.offsets[i];
            parts.push((u.clone(), total));
            // Deck-reduced cursor update in closed form: the path frame
            // advanced along the axis equals the axis translation applied on
            // the left, and the wrap reduces to the bounded net offset
            // between the feet. (The naive per-wrap recursion
            // g^-1 * cursor * S(u, l) amplifies transverse error by e^(2l)
            // per step and is numerically explosive.)
            let d_net = self.exit_params[i] - self.entry_params[i];
            let t_axis = Isometry::translation_along(&self.axes[i].extended(), d_net);
            cursor = t_axis.matrix() * cursor;

            if ray && i + 1 == depth {
                // Terminal ray along the current axis.
                let inv = lorentz_inverse(&cursor);
                let w = axis_tangent(&self.axes[i], self.exit_params[i]);
                let u = spatial_dir(&(&inv * w));
                parts.push((u, f64::INFINITY));
                break;
            }
            if i + 1 < self.axes.len() {
                cursor = self.transitions[i].inverse().matrix() * cursor;
            } else {
                break;
            }
        }
        PiecewisePath::from_turtle(anchor, parts)
    }

    /// Certified path + certificate, at theta = pi/2.
    pub fn certified_gamma(
        &self,
        tau: &TauSequence,
        depth: usize,
        ray: bool,
    ) -> Result<(PiecewisePath, QGCertificate)> {
        let path = self.build_inner(tau, depth, ray)?;
        let cert = certify(&path, CertMode::Long, std::f64::consts::FRAC_PI_2, 1.0)?;
        if !cert.is_certified() {
            return Err(Error::Build {
                index: depth,
                reason: "built path failed certification".into(),
            });
        }
        Ok((path, cert))
    }

    /// Ideal endpoint of the deepening family for `tau`: at each depth of
    /// the schedule the ray-completed path is certified and extrapolated;
    /// consecutive endpoints must settle below `cauchy_tol` in spherical
    /// distance, else the family needs more depth.
    pub fn endpoint_map(
        &self,
        tau: &TauSequence,
        depth_schedule: &[usize],
        cauchy_tol: f64,
    ) -> Result<(IdealPoint, Vec<(usize, IdealPoint)>)> {
        if depth_schedule.is_empty() {
            return Err(Error::Domain("empty depth schedule".into()));
        }
        let mut trace: Vec<(usize, IdealPoint)> = Vec::new();
        for &d in depth_schedule {
            let (path, cert) = self.certified_gamma(tau, d, true)?;
            let (xi, _) = ideal_endpoint(&path, &cert, 2.0, 1e-10)?;
            trace.push((d, xi));
        }
        if trace.len() >= 2 {
            let gap = trace[trace.len() - 2]
                .1
                .spherical_distance(&trace[trace.len() - 1].1);
            if gap >= cauchy_tol {
                return Err(Error::Inconclusive(format!(
                    "endpoint gap {gap:.3e} at final schedule depths; needs more depth"
                )));
            }
        }
        let last = trace.last().unwrap().1.clone();
        Ok((last, trace))
    }
}

fn lorentz_inverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let j = crate::minkowski::j_matrix(n);
    &j * m.transpose() * &j
}

fn spatial_dir(v: &DVector<f64>) -> DVector<f64> {
    let mut u = v.clone();
    u[0] = 0.0;
    let n = u.norm();
    u / n
}

fn axis_tangent(axis: &GeodesicSegment, t: f64) -> DVector<f64> {
    axis.basepoint().coords() * t.sinh() + axis.unit_tangent() * t.cosh()
}

fn transform_geodesic(iso: &Isometry, g: &GeodesicSegment) -> GeodesicSegment {
    let base = iso.apply(g.basepoint());
    let tangent = iso.matrix() * g.unit_tangent();
    GeodesicSegment::from_parts(base, tangent, 1.0)
        .expect("isometry image of a geodesic frame")
}

// ---- separation audit ------------------------------------------------------

/// Pairwise endpoint-separation data for a family of tau sequences.
#[derive(Debug, Clone, Serialize)]
pub struct SeparationAudit {
    /// Spherical distances between endpoints, row-major.
    pub matrix: Vec<Vec<f64>>,
    /// Smallest off-diagonal separation.
    pub min_separation: f64,
    /// Whether every doubled path of a pair certified in long mode.
    pub doubled_paths_certified: bool,
}

/// Endpoint separation matrix for distinct tau prefixes at `depth`, plus
/// certification of the doubled path of each pair (the reversed tail of one
/// ray, the bridging arc along the first divergent axis, and the tail of the
/// other).
pub fn separation_audit(
    scaffold: &GeodesicScaffold,
    taus: &[TauSequence],
    depth: usize,
) -> Result<SeparationAudit> {
    for (i, a) in taus.iter().enumerate() {
        for (j, b) in taus.iter().enumerate().skip(i + 1) {
            if a.prefix(depth) == b.prefix(depth) {
                return Err(Error::Precondition(format!(
                    "tau sequences {i} and {j} coincide through depth {depth}"
                )));
            }
        }
    }
    let endpoints: Vec<IdealPoint> = taus
        .iter()
        .map(|t| scaffold.endpoint_map(t, &[depth], 1e-8).map(|(e, _)| e))
        .collect::<Result<_>>()?;
    let k = taus.len();
    let mut matrix = vec![vec![0.0; k]; k];
    let mut min_sep = f64::INFINITY;
    for i in 0..k {
        for j in 0..k {
            if i != j {
                let d = endpoints[i].spherical_distance(&endpoints[j]);
                matrix[i][j] = d;
                min_sep = min_sep.min(d);
            }
        }
    }
    let mut all_certified = true;
    for i in 0..k {
        for j in i + 1..k {
            let sigma = doubled_path(scaffold, &taus[i], &taus[j], depth)?;
            let cert = certify(&sigma, CertMode::Long, std::f64::consts::FRAC_PI_2, 1.0)?;
            if !cert.is_certified() {
                all_certified = false;
            }
        }
    }
    if min_sep <= 0.0 {
        return Err(Error::Inconclusive(
            "an endpoint pair is indistinguishable at this depth".into(),
        ));
    }
    Ok(SeparationAudit {
        matrix,
        min_separation: min_sep,
        doubled_paths_certified: all_certified,
    })
}

/// The doubled path of two tau rays diverging first at index m: the reversed
/// tail of the first, the bridge of length |t_m - t'_m| m_m l_m along axis
/// m, and the tail of the second. Built by splicing the developed forms; the
/// shared prefix frames make the splice exact.
pub fn doubled_path(
    scaffold: &GeodesicScaffold,
    tau_a: &TauSequence,
    tau_b: &TauSequence,
    depth: usize,
) -> Result<PiecewisePath> {
    let pa = tau_a.prefix(depth);
    let pb = tau_b.prefix(depth);
    let m = pa
        .iter()
        .zip(&pb)
        .position(|(x, y)| x != y)
        .ok_or_else(|| Error::Precondition("tau sequences agree through depth".into()))?;
    let ga = scaffold.build_gamma(tau_a, depth)?;
    let gb = scaffold.build_gamma(tau_b, depth)?;
    // Segment indices: mu_0 = 0, nu_1 = 1, mu_1 = 2, ...; nu_{m+1} has index
    // 2(m+1) - 1 = 2m + 1.
    let nu_idx = 2 * m + 1;
    let n_total = ga.segment_count();
    let mut parts: Vec<(DVector<f64>, f64)> = Vec::new();
    for k in (nu_idx + 1..n_total).rev() {
        parts.push((-ga.tangent(k), ga.segment_length(k)));
    }
    let delta_wraps = pb[m] as i64 - pa[m] as i64;
    let bridge = delta_wraps.unsigned_abs() as f64
        * scaffold.wraps[m] as f64
        * scaffold.lengths[m];
    let dir = if delta_wraps > 0 { 1.0 } else { -1.0 };
    parts.push((ga.tangent(nu_idx) * dir, bridge));
    for k in nu_idx + 1..gb.segment_count() {
        parts.push((gb.tangent(k).clone(), gb.segment_length(k)));
    }
    PiecewisePath::from_turtle(Isometry::identity(scaffold.dim()), parts)
}

// ---- built-in scaffold families ---------------------------------------------

/// Concentric-semicircle family in H^2: axis k is the half-plane semicircle
/// of radius e^(k s); all connectors lie on the vertical axis. The frame
/// transition is the dilation boost by `spacing`, so per-axis local data is
/// literally constant.
pub fn concentric_h2(count: usize, spacing: f64, translation: f64) -> Result<GeodesicScaffold> {
    let l_min = long_edge_threshold(std::f64::consts::FRAC_PI_2)?;
    if spacing < l_min {
        return Err(Error::Domain(format!(
            "spacing {spacing} below the long-edge threshold {l_min:.4}"
        )));
    }
    let axis0 = GeodesicSegment::from_parts(
        HPoint::origin(2),
        nalgebra::dvector![0.0, 0.0, 1.0],
        1.0,
    )?;
    let g0 = Isometry::translation_along(&axis0, translation);
    let h = Isometry::boost(2, 1, spacing)?;
    let base = Isometry::boost(2, 1, -spacing)?.apply(&HPoint::origin(2));
    GeodesicScaffold::new(
        base,
        vec![g0; count],
        vec![h; count - 1],
        l_min,
    )
}

/// Translated-circle family in H^3: unit semicircles centered along the
/// boundary x-axis at spacing `c`, with planes alternately tilted by `tilt`
/// about that axis. The frame transition is the parabolic translation
/// x -> x + c.
pub fn translated_h3(
    count: usize,
    c: f64,
    tilt: f64,
    translation: f64,
) -> Result<GeodesicScaffold> {
    let l_min = long_edge_threshold(std::f64::consts::FRAC_PI_2)?;
    let mut gens = Vec::with_capacity(count);
    for k in 0..count {
        let phi = if k % 2 == 0 { 0.0 } else { tilt };
        let xi = IdealPoint::from_null(nalgebra::dvector![1.0, 0.0, phi.cos(), phi.sin()])?;
        let eta = IdealPoint::from_null(nalgebra::dvector![1.0, 0.0, -phi.cos(), -phi.sin()])?;
        let axis = GeodesicSegment::line(&eta, &xi)?;
        gens.push(Isometry::translation_along(&axis, translation));
    }
    let t = Isometry::from_sl2c(
        num_complex::Complex64::new(1.0, 0.0),
        num_complex::Complex64::new(c, 0.0),
        num_complex::Complex64::new(0.0, 0.0),
        num_complex::Complex64::new(1.0, 0.0),
    )?;
    // Basepoint: apex of a virtual circle one step before the first axis.
    let inv = t.inverse();
    let base = inv.apply(&HPoint::origin(3));
    GeodesicScaffold::new(base, gens, vec![t; count - 1], l_min)
}

// ---- conicality diagnostic ---------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConicalityEvidence {
    Conical,
    NonconicalAtHorizon,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConicalityReport {
    pub evidence: ConicalityEvidence,
    /// Largest ray parameter reached by orbit points within the tube radius.
    pub sup_parameter: f64,
    pub orbit_points: usize,
    pub qualifying_points: usize,
}

/// Finite-scale conicality diagnostic: enumerate the orbit of `basepoint`
/// under words in the generators up to `budget` letters, intersect with the
/// `tube_radius`-neighborhood of the ray from `basepoint` toward `xi`, and
/// compare the supremum of reached ray parameters against `horizon`. This is
/// explicitly evidence at a finite scale, not a decision procedure.
pub fn conicality_diagnostic(
    generators: &[Isometry],
    xi: &IdealPoint,
    basepoint: &HPoint,
    tube_radius: f64,
    horizon: f64,
    budget: u32,
) -> Result<ConicalityReport> {
    if horizon <= 0.0 || tube_radius < 0.0 {
        return Err(Error::Domain(
            "horizon must be positive, tube radius nonnegative".into(),
        ));
    }
    let ray = GeodesicSegment::ray(basepoint, xi)?;
    let mut orbit: Vec<(u32, HPoint)> = vec![(0, basepoint.clone())];
    if generators.len() == 1 {
        // Cyclic case: powers in both directions. The enumeration stops at
        // the coordinate envelope (orbit points ~e^13 from the basepoint);
        // beyond it the quadratic form loses the sheet signal.
        let g = &generators[0];
        let mut fwd = g.clone();
        let mut bwd = g.inverse();
        for k in 1..=budget {
            let fp = HPoint::from_timelike(fwd.matrix() * basepoint.coords());
            let bp = HPoint::from_timelike(bwd.matrix() * basepoint.coords());
            let (Ok(fp), Ok(bp)) = (fp, bp) else { break };
            orbit.push((k, fp));
            orbit.push((k, bp));
            if k < budget {
                fwd = fwd.compose(g);
                bwd = bwd.compose(&g.inverse());
            }
            if fwd.matrix().amax() > 1e6 || bwd.matrix().amax() > 1e6 {
                break;
            }
        }
    } else {
        // Breadth-first words without immediate backtracking.
        let mut alphabet = Vec::new();
        for g in generators {
            alphabet.push(g.clone());
            alphabet.push(g.inverse());
        }
        let mut frontier: Vec<(usize, Isometry)> =
            vec![(usize::MAX, Isometry::identity(basepoint.dim()))];
        for depth in 1..=budget {
            let mut next = Vec::new();
            for (last, w) in &frontier {
                for (ai, a) in alphabet.iter().enumerate() {
                    if *last != usize::MAX && (ai ^ 1) == *last {
                        continue;
                    }
                    let nw = w.compose(a);
                    orbit.push((depth, nw.apply(basepoint)));
                    next.push((ai, nw));
                }
            }
            frontier = next;
            if frontier.len() > 20_000 {
                break;
            }
        }
    }
    let mut sup_param = f64::NEG_INFINITY;
    let mut qualifying = 0usize;
    let mut deepest_qualifying: u32 = 0;
    for (wl, p) in &orbit {
        let (foot, d) = project_to_geodesic(p, &ray)?;
        if d <= tube_radius + 1e-9 {
            qualifying += 1;
            deepest_qualifying = deepest_qualifying.max(*wl);
            let t = dist(&foot, basepoint);
            sup_param = sup_param.max(t);
        }
    }
    if sup_param >= horizon {
        return Ok(ConicalityReport {
            evidence: ConicalityEvidence::Conical,
            sup_parameter: sup_param,
            orbit_points: orbit.len(),
            qualifying_points: qualifying,
        });
    }
    // Nonconical evidence requires the qualifying set to have saturated well
    // inside the budget; otherwise a longer enumeration might still reach.
    if deepest_qualifying <= budget / 2 {
        Ok(ConicalityReport {
            evidence: ConicalityEvidence::NonconicalAtHorizon,
            sup_parameter: if sup_param.is_finite() { sup_param } else { 0.0 },
            orbit_points: orbit.len(),
            qualifying_points: qualifying,
        })
    } else {
        Err(Error::Inconclusive(format!(
            "qualifying orbit points still appear at word length {deepest_qualifying} of budget {budget}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn desk_scaffold() -> GeodesicScaffold {
        concentric_h2(14, 4.7, 1.0).unwrap()
    }

    #[test]
    fn concentric_scaffold_validates() {
        let s = desk_scaffold();
        assert_eq!(s.axis_count(), 14);
        assert_eq!(s.wrap_counts()[0], 5); // minimal m with m * 1 > 4.4001
        assert_abs_diff_eq!(s.connector_lengths()[1], 4.7, epsilon = 1e-9);
        for d in s.offsets.iter() {
            assert!(d.abs() < 1e-9, "concentric offsets vanish, got {d}");
        }
    }

    #[test]
    fn depth_zero_is_single_connector() {
        let s = desk_scaffold();
        let tau = TauSequence::constant(1).unwrap();
        let p = s.build_gamma(&tau, 0).unwrap();
        assert_eq!(p.segment_count(), 1);
        assert_abs_diff_eq!(p.total_length(), 4.7, epsilon = 1e-9);
    }

    #[test]
    fn built_path_certifies_with_exact_lengths() {
        let s = desk_scaffold();
        let tau = TauSequence::new(vec![1, 2, 1], 1).unwrap();
        let (path, cert) = s.certified_gamma(&tau, 3, false).unwrap();
        assert!(cert.is_certified());
        // mu_0, nu_1, mu_1, nu_2, mu_2, nu_3.
        assert_eq!(path.segment_count(), 6);
        let expect: f64 = 4.7 + (1.0 * 5.0) + 4.7 + (2.0 * 5.0) + 4.7 + (1.0 * 5.0);
        assert_abs_diff_eq!(path.total_length(), expect, epsilon = 1e-9);
        // All interior angles are right angles.
        for a in path.vertex_angles() {
            assert_abs_diff_eq!(a, std::f64::consts::FRAC_PI_2, epsilon = 1e-7);
        }
    }

    #[test]
    fn prefix_determinism_across_taus() {
        let s = desk_scaffold();
        let t1 = TauSequence::new(vec![1, 1, 2, 1], 1).unwrap();
        let t2 = TauSequence::new(vec![1, 1, 3, 2], 1).unwrap();
        let p1 = s.build_gamma(&t1, 4).unwrap();
        let p2 = s.build_gamma(&t2, 4).unwrap();
        // Shared prefix through mu_2 (segments 0..=4 agree; they diverge at
        // nu_3, segment index 5).
        for k in 0..5 {
            assert_abs_diff_eq!(p1.segment_length(k), p2.segment_length(k), epsilon = 1e-12);
            assert!((p1.tangent(k) - p2.tangent(k)).amax() < 1e-12);
        }
        assert!((p1.segment_length(5) - p2.segment_length(5)).abs() > 1.0);
    }

    #[test]
    fn single_axis_endpoint_is_attracting_point() {
        let s = concentric_h2(2, 4.7, 1.0).unwrap();
        let tau = TauSequence::constant(1).unwrap();
        let (xi, _) = s.endpoint_map(&tau, &[1], 1e-8).unwrap();
        // Axis 1 = unit semicircle toward +x in half-plane coordinates:
        // attracting point is the null direction of (1, 0, 1).
        let expect = IdealPoint::from_null(nalgebra::dvector![1.0, 0.0, 1.0]).unwrap();
        assert!(xi.spherical_distance(&expect) < 1e-8);
    }

    #[test]
    fn endpoints_separate_and_double_path_certifies() {
        let s = desk_scaffold();
        let taus = vec![
            TauSequence::new(vec![1], 1).unwrap(),
            TauSequence::new(vec![2], 1).unwrap(),
            TauSequence::new(vec![3], 1).unwrap(),
        ];
        let audit = separation_audit(&s, &taus, 6).unwrap();
        assert!(audit.min_separation > 0.0);
        assert!(audit.doubled_paths_certified);
        // Permutation symmetry of the matrix.
        assert_abs_diff_eq!(audit.matrix[0][1], audit.matrix[1][0], epsilon = 1e-15);
    }

    #[test]
    fn duplicate_tau_is_a_precondition_error() {
        let s = desk_scaffold();
        let taus = vec![
            TauSequence::new(vec![1], 1).unwrap(),
            TauSequence::new(vec![1], 1).unwrap(),
        ];
        assert!(matches!(
            separation_audit(&s, &taus, 4),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn altering_initial_connector_preserves_endpoints() {
        // Two scaffolds differing only in basepoint (hence mu_0) give the
        // same endpoint for the same tau: the tails agree exactly.
        let s1 = concentric_h2(10, 4.7, 1.0).unwrap();
        let mut s2 = concentric_h2(10, 4.7, 1.0).unwrap();
        s2.basepoint = Isometry::boost(2, 1, -5.5).unwrap().apply(&HPoint::origin(2));
        let tau = TauSequence::new(vec![2, 1, 2], 1).unwrap();
        let (e1, _) = s1.endpoint_map(&tau, &[8], 1e-8).unwrap();
        let (e2, _) = s2.endpoint_map(&tau, &[8], 1e-8).unwrap();
        assert!(e1.spherical_distance(&e2) < 1e-8);
    }

    #[test]
    fn escape_surrogate_connector_distances_grow() {
        let s = desk_scaffold();
        let mut prev = 0.0;
        for i in 0..6 {
            let d = s.base_to_connector_distance(i).unwrap();
            assert!(d > prev, "connector {i} distance {d} did not grow");
            prev = d;
        }
    }

    #[test]
    fn h3_family_builds_and_certifies() {
        let s = translated_h3(6, 12.0, 0.4, 1.0).unwrap();
        let tau = TauSequence::new(vec![1, 2, 1], 1).unwrap();
        let (path, cert) = s.certified_gamma(&tau, 3, true).unwrap();
        assert!(cert.is_certified());
        let (xi, report) = ideal_endpoint(&path, &cert, 2.0, 1e-10).unwrap();
        assert!(report.final_gap < 1e-10);
        assert_eq!(xi.dim(), 3);
    }

    #[test]
    fn conical_for_loxodromic_axis_orbit() {
        let g = Isometry::boost(2, 1, 1.0).unwrap();
        let xi = match g.classify() {
            Classification::Loxodromic { attracting, .. } => attracting.clone(),
            _ => unreachable!(),
        };
        let report = conicality_diagnostic(
            &[g],
            &xi,
            &HPoint::origin(2),
            1.0,
            10.0,
            32,
        )
        .unwrap();
        assert_eq!(report.evidence, ConicalityEvidence::Conical);
        assert!(report.sup_parameter >= 10.0);
    }

    #[test]
    fn nonconical_for_parabolic_orbit() {
        let g = Isometry::from_sl2r(1.0, 1.0, 0.0, 1.0).unwrap();
        let xi = match g.classify() {
            Classification::Parabolic { fixed } => fixed.clone(),
            _ => unreachable!(),
        };
        let report = conicality_diagnostic(
            &[g.clone()],
            &xi,
            &HPoint::origin(2),
            1.0,
            10.0,
            256,
        )
        .unwrap();
        assert_eq!(report.evidence, ConicalityEvidence::NonconicalAtHorizon);
        // Tube radius zero: only on-ray points count; the orbit leaves the
        // ray immediately.
        let strict = conicality_diagnostic(&[g], &xi, &HPoint::origin(2), 0.0, 10.0, 256).unwrap();
        assert_eq!(strict.evidence, ConicalityEvidence::NonconicalAtHorizon);
        assert!(strict.qualifying_points >= 1); // the basepoint itself
    }

    #[test]
    fn deep_paths_remain_certified_and_cauchy() {
        let s = desk_scaffold();
        let tau = TauSequence::new(vec![2, 1, 3, 1, 2, 1, 1, 2, 1, 1, 1, 2], 1).unwrap();
        let (endpoint, trace) = s.endpoint_map(&tau, &[4, 8, 12], 1e-10).unwrap();
        assert_eq!(trace.len(), 3);
        assert_eq!(endpoint.dim(), 2);
    }
}
