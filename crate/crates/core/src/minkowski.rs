//! The Minkowski bilinear form on R^{n,1} with signature (-, +, ..., +).

use nalgebra::{DMatrix, DVector};

/// Minkowski inner product `<a,b> = -a_0 b_0 + a_1 b_1 + ... + a_n b_n`.
pub fn mink(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = -a[0] * b[0];
    for i in 1..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// Squared Minkowski norm `<a,a>`.
pub fn mink_norm2(a: &DVector<f64>) -> f64 {
    mink(a, a)
}

/// The form matrix J = diag(-1, 1, ..., 1) for ambient dimension n+1.
pub fn j_matrix(ambient: usize) -> DMatrix<f64> {
    let mut j = DMatrix::identity(ambient, ambient);
    j[(0, 0)] = -1.0;
    j
}

/// Component of `v` Minkowski-orthogonal to a unit timelike vector `x`
/// (`<x,x> = -1`): `v + <v,x> x`.
pub fn tangent_part(v: &DVector<f64>, x: &DVector<f64>) -> DVector<f64> {
    v + x * mink(v, x)
}

/// Euclidean norm of the spatial part (coordinates 1..), used for ideal-point
/// normalization and boundary comparisons.
pub fn spatial_norm(a: &DVector<f64>) -> f64 {
    let mut s = 0.0;
    for i in 1..a.len() {
        s += a[i] * a[i];
    }
    s.sqrt()
}
