//! Points of H^n (upper hyperboloid sheet) and of its ideal boundary (null
//! directions, normalized to time component 1).

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::minkowski::{mink_norm2, spatial_norm};
use crate::tol::{DIM_RANGE, FORM_TOL, RENORM_DRIFT};

/// A point on the upper sheet: `<x,x> = -1`, `x_0 > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPoint {
    coords: DVector<f64>,
}

impl HPoint {
    /// Validates the sheet invariants and wraps the coordinates.
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        check_ambient(coords.len())?;
        let q = mink_norm2(&coords);
        if (q + 1.0).abs() > FORM_TOL {
            return Err(Error::Model(format!(
                "<x,x> = {q:.3e}, expected -1 within {FORM_TOL:e}"
            )));
        }
        if coords[0] <= 0.0 {
            return Err(Error::Model("x_0 <= 0: not on the upper sheet".into()));
        }
        Ok(HPoint { coords })
    }

    /// Rescales a timelike vector onto the sheet. Drift of `<x,x>` beyond
    /// `RENORM_DRIFT` from -1 is an internal error, not silently fixed.
    pub fn renormalize(coords: DVector<f64>) -> Result<Self> {
        check_ambient(coords.len())?;
        let q = mink_norm2(&coords);
        if q >= 0.0 {
            return Err(Error::Model(format!("vector is not timelike: <x,x> = {q:.3e}")));
        }
        let scale = (-q).sqrt();
        // Rounding in an exact isometry action drifts the form by about
        // eps * amax^2, so the admissible drift scales with the coordinate
        // magnitude; at desk scale it is the bare RENORM_DRIFT.
        let amax = coords.amax();
        let tol = RENORM_DRIFT * (1.0 + 1e-9 * amax * amax);
        if (scale - 1.0).abs() > tol && (q + 1.0).abs() > tol {
            // Callers are expected to renormalize after every single action;
            // a large drift means an upstream computation went off the rails.
            return Err(Error::Model(format!(
                "normalization drift {:.3e} exceeds {tol:.3e}",
                (scale - 1.0).abs()
            )));
        }
        let mut v = coords / scale;
        if v[0] < 0.0 {
            v = -v;
        }
        Ok(HPoint { coords: v })
    }

    /// As `renormalize` but without the drift guard; for constructions that
    /// legitimately start far from the sheet (sums of points, interpolation).
    pub fn from_timelike(coords: DVector<f64>) -> Result<Self> {
        check_ambient(coords.len())?;
        let q = mink_norm2(&coords);
        if q >= 0.0 {
            return Err(Error::Model(format!("vector is not timelike: <x,x> = {q:.3e}")));
        }
        let mut v = coords / (-q).sqrt();
        if v[0] < 0.0 {
            v = -v;
        }
        Ok(HPoint { coords: v })
    }

    /// The model origin (1, 0, ..., 0) of H^n.
    pub fn origin(dim: usize) -> Self {
        let mut v = DVector::zeros(dim + 1);
        v[0] = 1.0;
        HPoint { coords: v }
    }

    /// Dimension n of the model this point lives in.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn into_coords(self) -> DVector<f64> {
        self.coords
    }
}

/// An ideal boundary point: a null direction with `x_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealPoint {
    coords: DVector<f64>,
}

impl IdealPoint {
    /// Validates nullity and the `x_0 = 1` normalization.
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        check_ambient(coords.len())?;
        if (coords[0] - 1.0).abs() > FORM_TOL {
            return Err(Error::Model(format!(
                "ideal point not normalized: x_0 = {}",
                coords[0]
            )));
        }
        let q = mink_norm2(&coords);
        if q.abs() > FORM_TOL {
            return Err(Error::Model(format!("<x,x> = {q:.3e}, expected 0")));
        }
        Ok(IdealPoint { coords })
    }

    /// Normalizes any future-pointing null (or nearly null) vector to x_0 = 1
    /// by rescaling the spatial part onto the unit sphere.
    pub fn from_null(coords: DVector<f64>) -> Result<Self> {
        check_ambient(coords.len())?;
        let sn = spatial_norm(&coords);
        if sn == 0.0 {
            return Err(Error::Degenerate("zero direction for ideal point".into()));
        }
        let mut v = coords.clone();
        if v[0] < 0.0 {
            v = -v;
        }
        v /= sn;
        v[0] = 1.0;
        Ok(IdealPoint { coords: v })
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    /// Spherical (angular) distance between two ideal points, i.e. the angle
    /// between their spatial unit vectors. This is the boundary metric used
    /// by every endpoint comparison.
    pub fn spherical_distance(&self, other: &IdealPoint) -> f64 {
        // Chordal form: acos bottoms out near 2e-8 for nearby directions,
        // while 2 asin(|u - v|/2) resolves angles down to machine precision.
        let mut q = 0.0;
        for i in 1..self.coords.len() {
            let d = self.coords[i] - other.coords[i];
            q += d * d;
        }
        2.0 * (q.sqrt() / 2.0).min(1.0).asin()
    }
}

pub(crate) fn check_ambient(ambient: usize) -> Result<()> {
    if ambient < 2 || !DIM_RANGE.contains(&(ambient - 1)) {
        return Err(Error::Domain(format!(
            "ambient dimension {ambient} outside supported H^2..H^4"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::mink;
    use nalgebra::dvector;

    #[test]
    fn origin_is_on_sheet() {
        let o = HPoint::origin(2);
        assert!((mink(o.coords(), o.coords()) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn off_sheet_rejected() {
        assert!(HPoint::new(dvector![1.0, 0.5, 0.0]).is_err());
        assert!(HPoint::new(dvector![-1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn renormalize_guards_drift() {
        // Small drift is repaired.
        assert!(HPoint::renormalize(dvector![1.0000001, 0.0, 0.0]).is_ok());
        // Gross drift is an internal error.
        assert!(HPoint::renormalize(dvector![2.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn ideal_normalization() {
        let xi = IdealPoint::from_null(dvector![3.0, 3.0, 0.0]).unwrap();
        assert!((xi.coords()[0] - 1.0).abs() < 1e-15);
        assert!((xi.coords()[1] - 1.0).abs() < 1e-15);
        let eta = IdealPoint::from_null(dvector![1.0, 0.0, 1.0]).unwrap();
        assert!((xi.spherical_distance(&eta) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }
}
