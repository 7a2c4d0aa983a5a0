//! Lorentz-matrix isometries of H^n: validation, classification,
//! translation length, displacement, powers and SL(2) conversions.

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geodesic::{dist, GeodesicSegment};
use crate::minkowski::{j_matrix, mink, tangent_part};
use crate::point::{check_ambient, HPoint, IdealPoint};
use crate::tol::TRANSLATION_TOL;

/// Classification of an isometry together with its witness data.
#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    Identity,
    /// Fixed interior point.
    Elliptic { fixed: HPoint },
    /// Unique ideal fixed point.
    Parabolic { fixed: IdealPoint },
    /// Axis endpoints and translation length.
    Loxodromic {
        attracting: IdealPoint,
        repelling: IdealPoint,
        length: f64,
    },
}

impl Classification {
    pub fn name(&self) -> &'static str {
        match self {
            Classification::Identity => "identity",
            Classification::Elliptic { .. } => "elliptic",
            Classification::Parabolic { .. } => "parabolic",
            Classification::Loxodromic { .. } => "loxodromic",
        }
    }

    pub fn is_loxodromic(&self) -> bool {
        matches!(self, Classification::Loxodromic { .. })
    }

    pub fn is_parabolic(&self) -> bool {
        matches!(self, Classification::Parabolic { .. })
    }
}

/// An isometry of H^n stored as a Lorentz matrix (`G^T J G = J`, `G_00 > 0`).
/// Classification is computed lazily and cached; recomputation is idempotent
/// so the once-cell publish is race-safe.
#[derive(Debug, Clone)]
pub struct Isometry {
    matrix: DMatrix<f64>,
    class: Arc<OnceLock<Classification>>,
}

impl Isometry {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Model("isometry matrix must be square".into()));
        }
        check_ambient(matrix.nrows())?;
        let j = j_matrix(matrix.nrows());
        let residual = matrix.transpose() * &j * &matrix - &j;
        // The Lorentz residual of a numerically computed product scales with
        // the squared magnitude of the entries; tolerate that scale.
        let scale = matrix.amax().max(1.0);
        let tol = crate::tol::LORENTZ_TOL * scale * scale;
        if residual.amax() > tol {
            return Err(Error::Model(format!(
                "matrix is not Lorentz: |G^T J G - J| = {:.3e} (tol {:.1e})",
                residual.amax(),
                tol
            )));
        }
        if matrix[(0, 0)] <= 0.0 {
            return Err(Error::Model("matrix swaps the hyperboloid sheets".into()));
        }
        Ok(Isometry {
            matrix,
            class: Arc::new(OnceLock::new()),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Isometry {
            matrix: DMatrix::identity(dim + 1, dim + 1),
            class: Arc::new(OnceLock::new()),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Dimension n of the underlying H^n.
    pub fn dim(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn apply(&self, x: &HPoint) -> HPoint {
        // Rescale unconditionally: compounded chains of legitimate actions
        // drift beyond any fixed absolute guard; input validation happens at
        // the construction/parsing surfaces instead.
        HPoint::from_timelike(&self.matrix * x.coords())
            .expect("isometry image of a sheet point is a sheet point")
    }

    pub fn apply_ideal(&self, xi: &IdealPoint) -> IdealPoint {
        IdealPoint::from_null(&self.matrix * xi.coords()).expect("isometry image of a null vector")
    }

    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            matrix: &self.matrix * &other.matrix,
            class: Arc::new(OnceLock::new()),
        }
    }

    pub fn inverse(&self) -> Isometry {
        // J G^T J is the Lorentz inverse; cheaper and more stable than LU.
        let j = j_matrix(self.matrix.nrows());
        Isometry {
            matrix: &j * self.matrix.transpose() * &j,
            class: Arc::new(OnceLock::new()),
        }
    }

    /// Integer power by binary exponentiation.
    pub fn pow(&self, k: i64) -> Isometry {
        if k == 0 {
            return Isometry::identity(self.dim());
        }
        let mut base = if k > 0 { self.clone() } else { self.inverse() };
        let mut e = k.unsigned_abs();
        let mut acc = Isometry::identity(self.dim());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base);
            }
        }
        acc
    }

    /// `d_g(x) = d(x, g x)`.
    pub fn displacement(&self, x: &HPoint) -> f64 {
        dist(x, &self.apply(x))
    }

    /// Translation length `l(g) = inf_x d(x, g x)`: positive for loxodromic
    /// isometries (log of the dominant eigenvalue modulus), zero otherwise.
    pub fn translation_length(&self) -> f64 {
        match self.classify() {
            Classification::Loxodromic { length, .. } => *length,
            _ => 0.0,
        }
    }

    /// Axis of a loxodromic isometry, oriented toward the attracting ideal
    /// point.
    pub fn axis(&self) -> Result<GeodesicSegment> {
        match self.classify() {
            Classification::Loxodromic {
                attracting,
                repelling,
                ..
            } => GeodesicSegment::line(repelling, attracting),
            c => Err(Error::Class(format!("axis of a {} isometry", c.name()))),
        }
    }

    /// Lazy cached classification.
    pub fn classify(&self) -> &Classification {
        self.class.get_or_init(|| classify_matrix(&self.matrix))
    }

    // ---- constructions -------------------------------------------------

    /// Pure boost by `t` in the (x_0, x_axis) plane.
    pub fn boost(dim: usize, axis: usize, t: f64) -> Result<Isometry> {
        if axis == 0 || axis > dim {
            return Err(Error::Domain("boost axis out of range".into()));
        }
        let mut m = DMatrix::identity(dim + 1, dim + 1);
        m[(0, 0)] = t.cosh();
        m[(axis, axis)] = t.cosh();
        m[(0, axis)] = t.sinh();
        m[(axis, 0)] = t.sinh();
        Ok(Isometry {
            matrix: m,
            class: Arc::new(OnceLock::new()),
        })
    }

    /// Rotation by `theta` in the spatial (i, j) plane.
    pub fn rotation(dim: usize, i: usize, j: usize, theta: f64) -> Result<Isometry> {
        if i == 0 || j == 0 || i == j || i > dim || j > dim {
            return Err(Error::Domain("rotation plane out of range".into()));
        }
        let mut m = DMatrix::identity(dim + 1, dim + 1);
        m[(i, i)] = theta.cos();
        m[(j, j)] = theta.cos();
        m[(i, j)] = -theta.sin();
        m[(j, i)] = theta.sin();
        Ok(Isometry {
            matrix: m,
            class: Arc::new(OnceLock::new()),
        })
    }

    /// Geodesic symmetry (point reflection) about `p`: an elliptic involution.
    pub fn point_reflection(p: &HPoint) -> Isometry {
        let n = p.dim() + 1;
        let j = j_matrix(n);
        let m = -DMatrix::identity(n, n) - 2.0 * p.coords() * p.coords().transpose() * j;
        Isometry {
            matrix: m,
            class: Arc::new(OnceLock::new()),
        }
    }

    /// Translation by `t` along the complete geodesic carrying `g`.
    pub fn translation_along(g: &GeodesicSegment, t: f64) -> Isometry {
        let p = g.basepoint().coords();
        let v = g.unit_tangent();
        let n = p.len();
        let j = j_matrix(n);
        let ppj = p * p.transpose() * &j;
        let vvj = v * v.transpose() * &j;
        let pvj = p * v.transpose() * &j;
        let vpj = v * p.transpose() * &j;
        let m = DMatrix::identity(n, n) + (t.cosh() - 1.0) * (vvj - ppj) + t.sinh() * (pvj - vpj);
        Isometry {
            matrix: m,
            class: Arc::new(OnceLock::new()),
        }
    }

    /// Image of an SL(2, R) matrix under the symmetric-square homomorphism
    /// onto the orientation-preserving Lorentz group of H^2. A point
    /// x = (x_0, x_1, x_2) corresponds to the quadratic form
    /// S = [[x_0+x_1, x_2], [x_2, x_0-x_1]] and g acts by S -> g S g^T.
    pub fn from_sl2r(a: f64, b: f64, c: f64, d: f64) -> Result<Isometry> {
        let det = a * d - b * c;
        if (det - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("sl2 matrix must have det 1, got {det}")));
        }
        let act = |s11: f64, s12: f64, s22: f64| -> (f64, f64, f64) {
            // g [[s11,s12],[s12,s22]] g^T
            let t11 = a * (a * s11 + b * s12) + b * (a * s12 + b * s22);
            let t12 = c * (a * s11 + b * s12) + d * (a * s12 + b * s22);
            let t22 = c * (c * s11 + d * s12) + d * (c * s12 + d * s22);
            (t11, t12, t22)
        };
        let mut m = DMatrix::zeros(3, 3);
        for (k, (s11, s12, s22)) in [(1.0, 0.0, 1.0), (1.0, 0.0, -1.0), (0.0, 1.0, 0.0)]
            .into_iter()
            .enumerate()
        {
            let (t11, t12, t22) = act(s11, s12, s22);
            m[(0, k)] = (t11 + t22) / 2.0;
            m[(1, k)] = (t11 - t22) / 2.0;
            m[(2, k)] = t12;
        }
        Isometry::new(m)
    }

    /// Image of an SL(2, C) matrix acting on Hermitian forms
    /// S = [[x_0+x_1, x_2 + i x_3], [x_2 - i x_3, x_0-x_1]] by S -> g S g^*,
    /// the standard isomorphism onto the orientation-preserving Lorentz group
    /// of H^3.
    pub fn from_sl2c(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Isometry> {
        let det = a * d - b * c;
        if (det - Complex64::new(1.0, 0.0)).norm() > 1e-9 {
            return Err(Error::Domain(format!("sl2 matrix must have det 1, got {det}")));
        }
        let act = |s11: Complex64, s12: Complex64, s22: Complex64| {
            let s21 = s12.conj();
            // t = g S g^*
            let u11 = a * s11 + b * s21;
            let u12 = a * s12 + b * s22;
            let u21 = c * s11 + d * s21;
            let u22 = c * s12 + d * s22;
            let t11 = u11 * a.conj() + u12 * b.conj();
            let t12 = u11 * c.conj() + u12 * d.conj();
            let t22 = u21 * c.conj() + u22 * d.conj();
            (t11, t12, t22)
        };
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let zero = Complex64::new(0.0, 0.0);
        let basis = [
            (one, zero, one),
            (one, zero, -one),
            (zero, one, zero),
            (zero, i, zero),
        ];
        let mut m = DMatrix::zeros(4, 4);
        for (k, (s11, s12, s22)) in basis.into_iter().enumerate() {
            let (t11, t12, t22) = act(s11, s12, s22);
            m[(0, k)] = (t11.re + t22.re) / 2.0;
            m[(1, k)] = (t11.re - t22.re) / 2.0;
            m[(2, k)] = t12.re;
            m[(3, k)] = t12.im;
        }
        Isometry::new(m)
    }
}

// ---- classification internals ------------------------------------------

fn classify_matrix(m: &DMatrix<f64>) -> Classification {
    let n = m.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    if (m - &id).amax() < 1e-9 {
        return Classification::Identity;
    }

    let scale = m.amax().max(1.0);
    let rho = m
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0_f64, f64::max);
    let l_raw = rho.max(1.0).ln();

    // Dense eigensolvers resolve the defective (parabolic) eigenvalue 1 only
    // to about (eps * scale)^(1/3); below that the spectral radius carries
    // no information and the fixed-point analysis decides.
    let spectral_noise = 40.0 * (f64::EPSILON * scale).powf(1.0 / 3.0);
    if l_raw > spectral_noise {
        if let Some(c) = classify_loxodromic(m, rho) {
            return c;
        }
    }

    // No usable spectral gap: examine the fixed-point structure, i.e. the
    // kernel of (G - I) and the restriction of the Minkowski form to it.
    let svd = (m - &id).clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("svd with v_t");
    let kernel_tol = 1e-6 * scale;
    let mut kernel: Vec<DVector<f64>> = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s < kernel_tol {
            kernel.push(v_t.row(i).transpose());
        }
    }

    if !kernel.is_empty() {
        let k = kernel.len();
        let mut gram = DMatrix::zeros(k, k);
        for i in 0..k {
            for jj in 0..k {
                gram[(i, jj)] = mink(&kernel[i], &kernel[jj]);
            }
        }
        let eig = gram.clone().symmetric_eigen();
        let (mut min_val, mut min_idx) = (f64::INFINITY, 0);
        for (i, ev) in eig.eigenvalues.iter().enumerate() {
            if *ev < min_val {
                min_val = *ev;
                min_idx = i;
            }
        }
        let combo = || -> DVector<f64> {
            let mut v = DVector::zeros(n);
            for i in 0..k {
                v += &kernel[i] * eig.eigenvectors[(i, min_idx)];
            }
            v
        };
        if min_val < -1e-7 {
            // Timelike fixed vector: elliptic, provided the witness really is
            // fixed (guards against a fake kernel from a tiny loxodromic).
            if let Ok(p) = HPoint::from_timelike(combo()) {
                let moved = HPoint::renormalize(m * p.coords()).map(|q| dist(&p, &q));
                if let Ok(d) = moved {
                    if d < 1e-7 {
                        return Classification::Elliptic { fixed: p };
                    }
                }
            }
        } else if min_val.abs() < 1e-6 {
            // Null fixed direction: parabolic.
            if let Ok(xi) = IdealPoint::from_null(combo()) {
                let img = m * xi.coords();
                if let Ok(img) = IdealPoint::from_null(img) {
                    if img.spherical_distance(&xi) < 1e-6 {
                        return Classification::Parabolic { fixed: xi };
                    }
                }
            }
        }
    }

    // Last resort: measure orbit growth to separate slow translations from
    // parabolic (logarithmic) displacement growth.
    classify_by_growth(m)
}

fn classify_loxodromic(m: &DMatrix<f64>, rho: f64) -> Option<Classification> {
    let plus = null_eigenvector(m, rho)?;
    let minus = null_eigenvector(m, 1.0 / rho)?;
    let attracting = IdealPoint::from_null(plus).ok()?;
    let repelling = IdealPoint::from_null(minus).ok()?;
    // A perturbed Jordan block yields two pseudo-eigenvectors hugging the
    // same null direction; genuine axes keep their endpoints apart.
    if attracting.spherical_distance(&repelling) < 1e-6 {
        return None;
    }
    // Point on the axis; its displacement is the translation length
    // (rotation about the axis does not move axis points). For a clear
    // spectral gap the eigenvalue log is sharper: eigenvector error enters
    // the displacement quadratically with an e^l-sized coefficient.
    let x = HPoint::from_timelike(attracting.coords() + repelling.coords()).ok()?;
    let gx = HPoint::renormalize(m * x.coords()).ok()?;
    let l_disp = dist(&x, &gx);
    let l_spec = rho.ln();
    if l_spec <= 1e-3 && (l_disp < 0.3 * l_spec || l_disp > 3.0 * l_spec) {
        // Near the noise floor the axis witness must confirm the spectrum.
        return None;
    }
    let length = if l_spec > 1e-3 { l_spec } else { l_disp };
    if length <= TRANSLATION_TOL {
        return None;
    }
    Some(Classification::Loxodromic {
        attracting,
        repelling,
        length,
    })
}

/// Eigenvector for the (real, simple) eigenvalue `lambda` by shifted inverse
/// iteration.
fn null_eigenvector(m: &DMatrix<f64>, lambda: f64) -> Option<DVector<f64>> {
    let n = m.nrows();
    let shift = lambda * (1.0 + 1e-12) + 1e-300;
    let shifted = m - DMatrix::<f64>::identity(n, n) * shift;
    let lu = shifted.lu();
    let mut v = DVector::from_element(n, 1.0);
    v[0] = 1.5; // break symmetry
    for _ in 0..8 {
        let mut w = lu.solve(&v)?;
        let norm = w.norm();
        if !norm.is_finite() || norm == 0.0 {
            return None;
        }
        w /= norm;
        v = w;
    }
    // Residual check.
    let r = m * &v - &v * lambda;
    if r.norm() > 1e-5 * m.amax().max(1.0) {
        return None;
    }
    Some(v)
}

fn classify_by_growth(m: &DMatrix<f64>) -> Classification {
    let n = m.nrows();
    let x0 = HPoint::origin(n - 1);
    // Displacements of g^(2^j) at the origin via repeated squaring;
    // d(o, g^k o) = arccosh((g^k)_00), stable at any representable scale.
    let mut pw = m.clone();
    let mut disps = Vec::new();
    for _ in 0..30 {
        disps.push(pw[(0, 0)].max(1.0).acosh());
        if pw.amax() > 1e120 {
            break;
        }
        pw = &pw * &pw;
    }
    let k = disps.len();
    if k >= 2 {
        let last = disps[k - 1];
        let prev = disps[k - 2];
        let step = 2f64.powi(k as i32 - 1) - 2f64.powi(k as i32 - 2);
        // Linear growth means a positive translation length.
        if last - prev > 20.0 {
            let l_est = (last - prev) / step;
            // Fixed directions from the dominant power.
            let fwd = IdealPoint::from_null(pw.column(0).into_owned());
            let j = j_matrix(n);
            let inv = &j * m.transpose() * &j;
            let mut pwi = inv.clone();
            for _ in 0..k.saturating_sub(1) {
                if pwi.amax() > 1e120 {
                    break;
                }
                pwi = &pwi * &pwi;
            }
            let bwd = IdealPoint::from_null(pwi.column(0).into_owned());
            if let (Ok(a), Ok(r)) = (fwd, bwd) {
                if a.spherical_distance(&r) > 1e-9 {
                    if let Ok(x) = HPoint::from_timelike(a.coords() + r.coords()) {
                        let l = m_displacement(m, &x).max(l_est);
                        return Classification::Loxodromic {
                            attracting: a,
                            repelling: r,
                            length: l,
                        };
                    }
                }
            }
        }
    }
    // Bounded or logarithmic growth: elliptic if the displacement infimum is
    // (numerically) attained, else parabolic with the fixed direction taken
    // from the dominant power.
    if let Some(x) = minimize_displacement(m, &x0) {
        if m_displacement(m, &x) < 1e-8 {
            return Classification::Elliptic { fixed: x };
        }
    }
    let mut pw = m.clone();
    for _ in 0..20 {
        if pw.amax() > 1e100 {
            break;
        }
        pw = &pw * &pw;
    }
    let xi = IdealPoint::from_null(pw.column(0).into_owned())
        .or_else(|_| IdealPoint::from_null(pw * HPoint::origin(n - 1).into_coords()))
        .expect("parabolic fixed direction");
    Classification::Parabolic { fixed: xi }
}

fn m_displacement(m: &DMatrix<f64>, x: &HPoint) -> f64 {
    HPoint::from_timelike(m * x.coords())
        .map(|y| dist(x, &y))
        .unwrap_or(f64::INFINITY)
}

/// Gradient descent on `x -> cosh d(x, g x)` over a trust region around the
/// seed; returns the best point found. The displacement function is convex,
/// so this converges to the infimum when it is attained nearby.
pub fn minimize_displacement(m: &DMatrix<f64>, seed: &HPoint) -> Option<HPoint> {
    let n = m.nrows();
    let j = j_matrix(n);
    let inv = &j * m.transpose() * &j;
    let mut x = seed.clone();
    let mut fx = -mink(x.coords(), &(m * x.coords()));
    let mut step = 0.5_f64;
    for _ in 0..400 {
        // Minkowski gradient of -<x, Gx> is -(G + G^{-1}) x; project to the
        // tangent space at x.
        let g = -(m * x.coords() + &inv * x.coords());
        let grad = tangent_part(&g, x.coords());
        let gn = mink(&grad, &grad).sqrt();
        if gn < 1e-12 {
            break;
        }
        let mut improved = false;
        let mut s = step;
        for _ in 0..30 {
            let cand = x.coords() - &grad * (s / gn.max(1.0));
            if let Ok(y) = HPoint::from_timelike(cand) {
                if dist(seed, &y) < 60.0 {
                    let fy = -mink(y.coords(), &(m * y.coords()));
                    if fy < fx - 1e-16 {
                        x = y;
                        fx = fy;
                        improved = true;
                        step = (s * 1.5).min(1.0);
                        break;
                    }
                }
            }
            s *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::dvector;

    #[test]
    fn identity_classifies() {
        let id = Isometry::identity(2);
        assert_eq!(id.classify().name(), "identity");
        assert_eq!(id.translation_length(), 0.0);
    }

    #[test]
    fn boost_is_loxodromic_with_length_t() {
        let g = Isometry::boost(2, 1, 1.75).unwrap();
        match g.classify() {
            Classification::Loxodromic { length, .. } => {
                assert_abs_diff_eq!(*length, 1.75, epsilon = 1e-9)
            }
            c => panic!("expected loxodromic, got {}", c.name()),
        }
        // Displacement dominates the translation length everywhere.
        let x = HPoint::from_timelike(dvector![1.5, 0.3, 1.0]).unwrap();
        assert!(g.displacement(&x) >= g.translation_length() - 1e-9);
    }

    #[test]
    fn sl2_parabolic_fixes_infinity() {
        let g = Isometry::from_sl2r(1.0, 1.0, 0.0, 1.0).unwrap();
        match g.classify() {
            Classification::Parabolic { fixed } => {
                // In half-plane coordinates, infinity is the null direction
                // (1, 1, 0).
                let inf = IdealPoint::from_null(dvector![1.0, 1.0, 0.0]).unwrap();
                assert!(fixed.spherical_distance(&inf) < 1e-6);
            }
            c => panic!("expected parabolic, got {}", c.name()),
        }
        assert_eq!(g.translation_length(), 0.0);
    }

    #[test]
    fn sl2_trace_three_has_expected_length() {
        // tr = 3: l = 2 arccosh(3/2).
        let g = Isometry::from_sl2r(2.0, 1.0, 1.0, 1.0).unwrap();
        let expected = 2.0 * 1.5_f64.acosh();
        assert_abs_diff_eq!(g.translation_length(), expected, epsilon = 1e-9);
        assert_abs_diff_eq!(expected, 1.9248473002, epsilon = 1e-9);
    }

    #[test]
    fn conjugation_invariance_of_length() {
        let g = Isometry::from_sl2r(2.0, 1.0, 1.0, 1.0).unwrap();
        let h = Isometry::boost(2, 2, 0.9)
            .unwrap()
            .compose(&Isometry::rotation(2, 1, 2, 0.4).unwrap());
        let conj = h.compose(&g).compose(&h.inverse());
        assert_abs_diff_eq!(
            conj.translation_length(),
            g.translation_length(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn rotation_is_elliptic_with_interior_witness() {
        let g = Isometry::rotation(3, 1, 2, 1.1).unwrap();
        match g.classify() {
            Classification::Elliptic { fixed } => {
                assert!(g.displacement(fixed) < 1e-9);
            }
            c => panic!("expected elliptic, got {}", c.name()),
        }
    }

    #[test]
    fn point_reflection_is_elliptic_involution() {
        let p = HPoint::from_timelike(dvector![1.2, 0.3, 0.55]).unwrap();
        let s = Isometry::point_reflection(&p);
        assert_eq!(s.classify().name(), "elliptic");
        let sq = s.compose(&s);
        assert_eq!(sq.classify().name(), "identity");
    }

    #[test]
    fn pow_matches_repeated_composition() {
        let g = Isometry::from_sl2r(1.0, 1.0, 0.0, 1.0).unwrap();
        let g3 = g.compose(&g).compose(&g);
        assert!((g.pow(3).matrix() - g3.matrix()).amax() < 1e-12);
        assert!((g.pow(-2).matrix() - g.inverse().compose(&g.inverse()).matrix()).amax() < 1e-12);
    }

    #[test]
    fn non_lorentz_rejected() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(Isometry::new(m).is_err());
    }

    #[test]
    fn translation_along_geodesic_translates_it() {
        let a = HPoint::origin(2);
        let b = HPoint::renormalize(dvector![1.0_f64.cosh(), 0.0, 1.0_f64.sinh()]).unwrap();
        let g = GeodesicSegment::between(&a, &b).unwrap();
        let t = Isometry::translation_along(&g, 0.7);
        let moved = t.apply(&a);
        assert_abs_diff_eq!(dist(&a, &moved), 0.7, epsilon = 1e-10);
        assert_abs_diff_eq!(t.translation_length(), 0.7, epsilon = 1e-8);
    }
}
