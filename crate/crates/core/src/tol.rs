//! Module-level tolerances and model constants. Geometric predicates share
//! these; they are not per-call knobs.

/// Absolute tolerance on Minkowski forms (`<x,x> = -1`, nullity, distances).
pub const FORM_TOL: f64 = 1e-9;

/// Absolute tolerance on angles.
pub const ANGLE_TOL: f64 = 1e-7;

/// Tolerance on the Lorentz condition `G^T J G = J`.
pub const LORENTZ_TOL: f64 = 1e-8;

/// Maximum admissible drift of `<x,x>` from -1 before renormalization; larger
/// drift is treated as an internal error rather than silently rescaled.
pub const RENORM_DRIFT: f64 = 1e-6;

/// Translation lengths below this are treated as zero when classifying.
pub const TRANSLATION_TOL: f64 = 1e-8;

/// Stall threshold for descent loops (alternating projection, subgradient).
pub const DESCENT_STALL: f64 = 1e-6;

/// Loxodromic detection threshold for word search; words with translation
/// length in (0, this) are reported indeterminate and skipped.
pub const LOX_WORD_TOL: f64 = 1e-6;

/// Hyperbolicity constant of H^n: geodesic triangles are delta-thin with
/// delta = arccosh(sqrt(2)) = 0.8813735870195430.
pub fn delta() -> f64 {
    2.0_f64.sqrt().acosh()
}

/// Supported dimension range for the model (H^2 through H^4).
pub const DIM_RANGE: std::ops::RangeInclusive<usize> = 2..=4;

/// Default Margulis parameter for demos; a user parameter, not a theorem.
pub const DEFAULT_EPSILON: f64 = 0.5;

/// Default power cap for the finite-power thin-set surrogate.
pub const DEFAULT_POWER_CAP: u32 = 64;
