//! Deterministic, counter-derived randomness and the samplers shared by the
//! property suites. A root seed plus an instance index yields an independent
//! stream, so parallel suite execution cannot reorder randomness.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::isometry::Isometry;
use crate::point::HPoint;

/// SplitMix64 finalizer; good avalanche for seed derivation.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Instance stream `index` of the root `seed`.
pub fn derive_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix(index)))
}

/// Uniform-ish random point within hyperbolic distance `radius` of the
/// origin (radial density proportional to sinh^(n-1)).
pub fn random_point(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> HPoint {
    let u = random_unit_spatial(rng, dim);
    // Invert the radial CDF by bisection on cosh-based mass.
    let target: f64 = rng.gen();
    let mass = |r: f64| -> f64 { crate::bounds::ball_volume(r.max(1e-9), dim).unwrap() };
    let total = mass(radius);
    let (mut lo, mut hi) = (0.0, radius);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if mass(mid) < target * total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    HPoint::from_timelike(
        HPoint::origin(dim).coords() * r.cosh() + u * r.sinh(),
    )
    .expect("radial point")
}

/// Random unit vector in the tangent space at the origin (spatial part).
pub fn random_unit_spatial(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    loop {
        let mut v = DVector::zeros(dim + 1);
        let mut n2 = 0.0;
        for i in 1..=dim {
            let x: f64 = rng.sample(rand_distr_standard());
            v[i] = x;
            n2 += x * x;
        }
        if n2 > 1e-12 {
            return v / n2.sqrt();
        }
    }
}

// Box-Muller standard normal without the rand_distr dependency.
struct StdNormal;
impl rand::distributions::Distribution<f64> for StdNormal {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u1: f64 = rng.gen_range(1e-12..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

fn rand_distr_standard() -> StdNormal {
    StdNormal
}

/// Random orientation-preserving isometry built from a short product of
/// elementary boosts and rotations; `scale` bounds the boost parameters.
pub fn random_isometry(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Isometry {
    let mut g = Isometry::identity(dim);
    for _ in 0..3 {
        let axis = rng.gen_range(1..=dim);
        let t: f64 = rng.gen_range(-scale..scale);
        g = g.compose(&Isometry::boost(dim, axis, t).unwrap());
        if dim >= 2 {
            let i = rng.gen_range(1..=dim);
            let mut j = rng.gen_range(1..=dim);
            while j == i {
                j = rng.gen_range(1..=dim);
            }
            let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            g = g.compose(&Isometry::rotation(dim, i, j, th).unwrap());
        }
    }
    g
}

/// Random parabolic isometry of H^2 or H^3 as a conjugated translation;
/// `shear` controls the translation magnitude.
pub fn random_parabolic(rng: &mut ChaCha8Rng, dim: usize, shear: f64) -> Isometry {
    let c: f64 = rng.gen_range(0.2..shear.max(0.4));
    let base = match dim {
        2 => Isometry::from_sl2r(1.0, c, 0.0, 1.0).unwrap(),
        3 => {
            let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            Isometry::from_sl2c(
                num_complex::Complex64::new(1.0, 0.0),
                num_complex::Complex64::new(c * phase.cos(), c * phase.sin()),
                num_complex::Complex64::new(0.0, 0.0),
                num_complex::Complex64::new(1.0, 0.0),
            )
            .unwrap()
        }
        _ => panic!("parabolic sampler supports H^2 and H^3"),
    };
    let h = random_isometry(rng, dim, 1.2);
    h.compose(&base).compose(&h.inverse())
}

/// Random nonelementary parabolic pair (distinct fixed points, checked).
pub fn random_parabolic_pair(rng: &mut ChaCha8Rng, dim: usize, shear: f64) -> (Isometry, Isometry) {
    loop {
        let g1 = random_parabolic(rng, dim, shear);
        let g2 = random_parabolic(rng, dim, shear);
        let f1 = match g1.classify() {
            crate::isometry::Classification::Parabolic { fixed } => fixed.clone(),
            _ => continue,
        };
        let f2 = match g2.classify() {
            crate::isometry::Classification::Parabolic { fixed } => fixed.clone(),
            _ => continue,
        };
        if f1.spherical_distance(&f2) > 1e-3 {
            return (g1, g2);
        }
    }
}

/// Random loxodromic with translation length in `[l_min, l_max]`.
pub fn random_loxodromic(
    rng: &mut ChaCha8Rng,
    dim: usize,
    l_min: f64,
    l_max: f64,
) -> Isometry {
    let l: f64 = rng.gen_range(l_min..l_max);
    let base = Isometry::boost(dim, 1, l).unwrap();
    let h = random_isometry(rng, dim, 1.2);
    h.compose(&base).compose(&h.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_streams_are_reproducible_and_distinct() {
        let mut a1 = derive_rng(7, 0);
        let mut a2 = derive_rng(7, 0);
        let mut b = derive_rng(7, 1);
        let x1: f64 = a1.gen();
        let x2: f64 = a2.gen();
        let y: f64 = b.gen();
        assert_eq!(x1, x2);
        assert_ne!(x1, y);
    }

    #[test]
    fn samplers_produce_valid_objects() {
        let mut rng = derive_rng(42, 3);
        for dim in 2..=4 {
            let p = random_point(&mut rng, dim, 2.0);
            assert_eq!(p.dim(), dim);
            let g = random_isometry(&mut rng, dim, 1.0);
            assert_eq!(g.dim(), dim);
        }
        let (g1, g2) = random_parabolic_pair(&mut rng, 2, 2.0);
        assert!(g1.classify().is_parabolic());
        assert!(g2.classify().is_parabolic());
        let l = random_loxodromic(&mut rng, 3, 0.5, 1.5);
        assert!(l.classify().is_loxodromic());
    }
}
