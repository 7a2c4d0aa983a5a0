//! Closed-form volume, packing and counting bounds used by the displacement
//! and distant-pair searches. The curvature pinching parameter `kappa`
//! defaults to 1 (constant curvature -1) and survives only inside these
//! formulas.

use crate::error::{Error, Result};
use crate::tol::delta;

/// Area of the unit sphere S^{n-1}, the volume prefactor of H^n balls.
pub fn sphere_area(n: usize) -> Result<f64> {
    match n {
        2 => Ok(2.0 * std::f64::consts::PI),
        3 => Ok(4.0 * std::f64::consts::PI),
        4 => Ok(2.0 * std::f64::consts::PI * std::f64::consts::PI),
        _ => Err(Error::Domain(format!("unsupported dimension {n}"))),
    }
}

/// Volume of the r-ball in H^n: `c_n * integral_0^r sinh^(n-1)(t) dt`,
/// in closed form.
pub fn ball_volume(r: f64, n: usize) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::Domain("ball radius must be positive".into()));
    }
    let c = sphere_area(n)?;
    Ok(match n {
        2 => c * (r.cosh() - 1.0),
        3 => c * ((2.0 * r).sinh() / 2.0 - r) / 2.0,
        // integral of sinh^3 = cosh^3/3 - cosh + 2/3
        4 => c * (r.cosh().powi(3) / 3.0 - r.cosh() + 2.0 / 3.0),
        _ => return Err(Error::Domain(format!("unsupported dimension {n}"))),
    })
}

/// The exponential majorant prefactor `C_n = c_n / (2^(n-1) (n-1))`, so that
/// `V(r, n) <= C_n e^((n-1) r)`.
pub fn volume_prefactor(n: usize) -> Result<f64> {
    Ok(sphere_area(n)? / (2f64.powi(n as i32 - 1) * (n as f64 - 1.0)))
}

/// Bound-formula bundle for a fixed dimension and pinching parameter.
#[derive(Debug, Clone)]
pub struct BoundFormulas {
    pub n: usize,
    pub kappa: f64,
    /// Quasiconvex-hull inflation radius; no closed form exists, so it is a
    /// configuration parameter (0 is adequate for the constant-curvature
    /// cyclic-group case handled here).
    pub r_hull: f64,
}

impl BoundFormulas {
    pub fn new(n: usize, kappa: f64, r_hull: f64) -> Result<Self> {
        if !(2..=4).contains(&n) {
            return Err(Error::Domain(format!("unsupported dimension {n}")));
        }
        if kappa <= 0.0 || r_hull < 0.0 {
            return Err(Error::Domain("kappa must be positive, r_hull nonnegative".into()));
        }
        Ok(BoundFormulas { n, kappa, r_hull })
    }

    pub fn standard(n: usize) -> Result<Self> {
        Self::new(n, 1.0, 0.0)
    }

    /// Packing count: points pairwise >= 2r apart inside B(x, R) number at
    /// most `V(kappa (R+r), n) / (kappa^n V(r, n))`.
    pub fn packing_count(&self, big_r: f64, r: f64) -> Result<f64> {
        Ok(ball_volume(self.kappa * (big_r + r), self.n)?
            / (self.kappa.powi(self.n as i32) * ball_volume(r, self.n)?))
    }

    /// Least power bound for the large-displacement search: some
    /// `0 < i <= N(eps, n, kappa, D)` satisfies `d(x, g^i x) >= D` whenever
    /// `x` sits outside the interior of the thin set at `eps`.
    pub fn displacement_power_bound(&self, eps: f64, d_target: f64) -> Result<f64> {
        if eps <= 0.0 || d_target < 0.0 {
            return Err(Error::Domain("eps must be positive, D nonnegative".into()));
        }
        let n1 = self.kappa * (self.n as f64 - 1.0);
        Ok(1.0
            + volume_prefactor(self.n)? * (n1 * eps / 2.0).exp()
                / (self.kappa.powi(self.n as i32) * ball_volume(eps / 2.0, self.n)?)
                * (n1 * d_target).exp())
    }

    /// Horospherical decay coefficient R(r): points on a common horosphere at
    /// distance <= r satisfy `d(rho_y(t), rho_z(t)) <= R(r) e^(-t)`; in
    /// constant curvature the sharp closed form is `2 sinh(r/2)`.
    pub fn decay_coefficient(r: f64) -> f64 {
        2.0 * (r / 2.0).sinh()
    }

    /// Distant-pair count: among at least this many pairwise-disjoint thin
    /// sets of parabolic subgroups, some pair is more than `d_target` apart.
    /// Assembled from the Helly radius `R1 = n delta + D/2 + r_hull`, the
    /// cusp-shrinking depth `R2 = max(ln(3 R(eps)/eps), 0)` and
    /// `R3 = R1 + R2 + eps/3`.
    pub fn distant_pair_bound(&self, d_target: f64, eps: f64) -> Result<f64> {
        if eps <= 0.0 || d_target < 0.0 {
            return Err(Error::Domain("eps must be positive, D nonnegative".into()));
        }
        let r1 = self.n as f64 * delta() + d_target / 2.0 + self.r_hull;
        let r2 = (3.0 * Self::decay_coefficient(eps) / eps).ln().max(0.0);
        let r3 = r1 + r2 + eps / 3.0;
        let n1 = self.kappa * (self.n as f64 - 1.0);
        Ok(volume_prefactor(self.n)? * (n1 * r3).exp() / ball_volume(eps / 3.0, self.n)? + 1.0)
    }

    /// Bounded-length loxodromic word count for symmetric generating sets,
    /// `ceil((C+1) (2 C delta / mu)^2)`, with the absolute constant `C` and
    /// the Margulis constant `mu` left as parameters. Reporting only; never
    /// a search cutoff.
    pub fn symmetric_word_bound(c_abs: f64, mu: f64) -> Result<f64> {
        if c_abs <= 0.0 || mu <= 0.0 {
            return Err(Error::Domain("constants must be positive".into()));
        }
        Ok(((c_abs + 1.0) * (2.0 * c_abs * delta() / mu).powi(2)).ceil())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn h2_ball_volume_closed_form() {
        // V(1, 2) = 2 pi (cosh 1 - 1).
        let v = ball_volume(1.0, 2).unwrap();
        assert_abs_diff_eq!(v, 2.0 * std::f64::consts::PI * (1.0_f64.cosh() - 1.0), epsilon = 1e-12);
    }

    #[test]
    fn volumes_match_quadrature() {
        // Cross-check the closed forms by Simpson quadrature of
        // c_n sinh^(n-1).
        for n in 2..=4usize {
            for r in [0.3, 1.0, 2.5] {
                let steps = 20_000;
                let h = r / steps as f64;
                let f = |t: f64| t.sinh().powi(n as i32 - 1);
                let mut acc = f(0.0) + f(r);
                for k in 1..steps {
                    acc += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
                }
                let quad = sphere_area(n).unwrap() * acc * h / 3.0;
                let closed = ball_volume(r, n).unwrap();
                assert_abs_diff_eq!(closed, quad, epsilon = 1e-8 * closed.max(1.0));
            }
        }
    }

    #[test]
    fn volume_strictly_increasing_and_majorized() {
        for n in 2..=4usize {
            let mut prev = 0.0;
            for k in 1..40 {
                let r = k as f64 * 0.25;
                let v = ball_volume(r, n).unwrap();
                assert!(v > prev);
                prev = v;
                let maj = volume_prefactor(n).unwrap() * ((n as f64 - 1.0) * r).exp();
                assert!(v <= maj * (1.0 + 1e-12), "majorant fails at r={r}, n={n}");
            }
        }
    }

    #[test]
    fn displacement_bound_at_zero_target() {
        let b = BoundFormulas::standard(2).unwrap();
        assert!(b.displacement_power_bound(0.5, 0.0).unwrap() >= 1.0);
    }

    #[test]
    fn bounds_monotone_in_target() {
        let b = BoundFormulas::standard(3).unwrap();
        let mut prev_n = 0.0;
        let mut prev_k = 0.0;
        for i in 0..20 {
            let d = i as f64 * 0.5;
            let n = b.displacement_power_bound(0.5, d).unwrap();
            let k = b.distant_pair_bound(d, 0.5).unwrap();
            assert!(n >= prev_n);
            assert!(k >= prev_k);
            prev_n = n;
            prev_k = k;
        }
    }

    #[test]
    fn decay_coefficient_dominates_exact_decay() {
        // 2 asinh(e^-t sinh(d0/2)) <= 2 sinh(d0/2) e^-t.
        for d0 in [0.1, 1.0, 3.0] {
            for t in [0.0, 0.5, 2.0, 6.0] {
                let exact = 2.0 * ((-t as f64).exp() * (d0 / 2.0_f64).sinh()).asinh();
                assert!(exact <= BoundFormulas::decay_coefficient(d0) * (-t as f64).exp() + 1e-15);
            }
        }
    }
}
