//! Computational engine for the hyperboloid model of hyperbolic space H^n,
//! 2 <= n <= 4.
//!
//! Points live on the upper sheet of the unit hyperboloid in Minkowski space
//! R^{n,1} with the bilinear form diag(-1, +1, ..., +1). On top of the model
//! primitives (geodesics, Busemann functions, bisectors, common
//! perpendiculars) the crate builds:
//!
//! * Lorentz-matrix isometries with classification, translation length,
//!   Margulis regions and thin parts of cyclic groups;
//! * comparison triangles/polygons and the CAT(-1) inequality battery;
//! * quasigeodesic certification for piecewise-geodesic paths, with measured
//!   constants and bisector-gap checks;
//! * loxodromic word search for parabolic pairs, coarse Helly centers and the
//!   packing/displacement bound formulas;
//! * the tau-indexed family of quasigeodesic rays whose ideal endpoints
//!   realize nonconical limit points, plus a finite-scale conicality
//!   diagnostic.
//!
//! All values are immutable and every operation is a pure function, so the
//! whole API is safe to use from any number of threads.

pub mod body;
pub mod bounds;
pub mod comparison;
pub mod error;
pub mod geodesic;
pub mod horosphere;
pub mod hyperplane;
pub mod isometry;
pub mod json;
pub mod limit;
pub mod loxodromic;
pub mod margulis;
pub mod minkowski;
pub mod perpendicular;
pub mod point;
pub mod quasigeodesic;
pub mod rng;
pub mod suite;
pub mod tol;

pub use body::ConvexBody;
pub use error::{Error, Result};
pub use geodesic::{angle_at, dist, project_to_geodesic, Endpoint, GeodesicSegment};
pub use horosphere::{busemann, ray_decay, Horoball};
pub use hyperplane::{bisector_distance, Hyperplane};
pub use isometry::{Classification, Isometry};
pub use limit::{GeodesicScaffold, TauSequence};
pub use loxodromic::LoxWord;
pub use margulis::{MargulisRegion, ThinSet};
pub use perpendicular::common_perpendicular;
pub use point::{HPoint, IdealPoint};
pub use quasigeodesic::{PiecewisePath, QGCertificate};
pub use suite::SuiteReport;
