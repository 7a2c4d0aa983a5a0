//! JSON wire formats (documented in docs/formats.md): points as coordinate
//! arrays, segments as {"start","end"}, isometries as row-major matrices
//! with a "dim" field or as SL(2) shorthand, paths as vertex lists.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geodesic::Endpoint;
use crate::isometry::Isometry;
use crate::limit::GeodesicScaffold;
use crate::point::{HPoint, IdealPoint};
use crate::quasigeodesic::PiecewisePath;

pub fn point_to_json(p: &HPoint) -> Value {
    json!(p.coords().iter().copied().collect::<Vec<f64>>())
}

pub fn ideal_to_json(xi: &IdealPoint) -> Value {
    json!(xi.coords().iter().copied().collect::<Vec<f64>>())
}

fn number_array(v: &Value, what: &str) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("{what}: expected an array")))?
        .iter()
        .map(|x| {
            x.as_f64()
                .ok_or_else(|| Error::Parse(format!("{what}: expected numbers")))
        })
        .collect()
}

pub fn point_from_json(v: &Value) -> Result<HPoint> {
    let coords = number_array(v, "point")?;
    HPoint::new(DVector::from_vec(coords))
}

pub fn ideal_from_json(v: &Value) -> Result<IdealPoint> {
    let coords = number_array(v, "ideal point")?;
    IdealPoint::new(DVector::from_vec(coords))
}

/// A vertex that may be interior (on-sheet) or ideal (null, x_0 = 1).
pub fn endpoint_from_json(v: &Value) -> Result<Endpoint> {
    let coords = DVector::from_vec(number_array(v, "vertex")?);
    if let Ok(p) = HPoint::new(coords.clone()) {
        return Ok(Endpoint::Interior(p));
    }
    IdealPoint::new(coords).map(Endpoint::Ideal)
}

pub fn endpoint_to_json(e: &Endpoint) -> Value {
    match e {
        Endpoint::Interior(p) => point_to_json(p),
        Endpoint::Ideal(xi) => ideal_to_json(xi),
    }
}

/// Isometry document: either `{"dim": n, "matrix": [...row-major...]}` or
/// the SL(2) shorthand `{"sl2": [[a,b],[c,d]], "field": "R"|"C"}` (complex
/// entries as [re, im] pairs), converted through the standard homomorphisms.
pub fn isometry_from_json(v: &Value) -> Result<Isometry> {
    if let Some(sl2) = v.get("sl2") {
        let field = v.get("field").and_then(|f| f.as_str()).unwrap_or("R");
        let rows = sl2
            .as_array()
            .ok_or_else(|| Error::Parse("sl2: expected 2x2 array".into()))?;
        if rows.len() != 2 {
            return Err(Error::Parse("sl2: expected 2 rows".into()));
        }
        let entry = |i: usize, j: usize| -> Result<Complex64> {
            let cell = rows[i]
                .as_array()
                .and_then(|r| r.get(j))
                .ok_or_else(|| Error::Parse("sl2: missing entry".into()))?;
            if let Some(x) = cell.as_f64() {
                return Ok(Complex64::new(x, 0.0));
            }
            let pair = number_array(cell, "sl2 complex entry")?;
            if pair.len() != 2 {
                return Err(Error::Parse("sl2 complex entry: expected [re, im]".into()));
            }
            Ok(Complex64::new(pair[0], pair[1]))
        };
        let (a, b, c, d) = (entry(0, 0)?, entry(0, 1)?, entry(1, 0)?, entry(1, 1)?);
        return match field {
            "R" => {
                if [a, b, c, d].iter().any(|z| z.im != 0.0) {
                    return Err(Error::Parse("field R with complex entries".into()));
                }
                Isometry::from_sl2r(a.re, b.re, c.re, d.re)
            }
            "C" => Isometry::from_sl2c(a, b, c, d),
            other => Err(Error::Parse(format!("unknown field {other:?}"))),
        };
    }
    let dim = v
        .get("dim")
        .and_then(|d| d.as_u64())
        .ok_or_else(|| Error::Parse("isometry: missing \"dim\"".into()))? as usize;
    let entries = number_array(
        v.get("matrix")
            .ok_or_else(|| Error::Parse("isometry: missing \"matrix\"".into()))?,
        "matrix",
    )?;
    let n = dim + 1;
    if entries.len() != n * n {
        return Err(Error::Parse(format!(
            "matrix: expected {} entries for dim {dim}, got {}",
            n * n,
            entries.len()
        )));
    }
    Isometry::new(DMatrix::from_row_slice(n, n, &entries))
}

pub fn isometry_to_json(g: &Isometry) -> Value {
    let n = g.dim() + 1;
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push(g.matrix()[(i, j)]);
        }
    }
    json!({ "dim": g.dim(), "matrix": entries })
}

/// Path document `{"vertices": [...], "closed": false}`.
pub fn path_from_json(v: &Value) -> Result<PiecewisePath> {
    let verts = v
        .get("vertices")
        .and_then(|x| x.as_array())
        .ok_or_else(|| Error::Parse("path: missing \"vertices\"".into()))?;
    let mut endpoints: Vec<Endpoint> = verts
        .iter()
        .map(endpoint_from_json)
        .collect::<Result<Vec<_>>>()?;
    if v.get("closed").and_then(|c| c.as_bool()).unwrap_or(false) {
        if let Some(first) = endpoints.first().cloned() {
            endpoints.push(first);
        }
    }
    PiecewisePath::from_vertices(&endpoints)
}

pub fn path_to_json(p: &PiecewisePath) -> Value {
    json!({
        "vertices": p.vertices_world().iter().map(endpoint_to_json).collect::<Vec<_>>(),
        "closed": false,
    })
}

/// Scaffold document: either `{"builtin": "concentric-h2" | "translated-h3",
/// "count": k}` (with optional family parameters) or `{"basepoint": [...],
/// "generators": [isometry...]}` in world coordinates (desk scale).
pub fn scaffold_from_json(v: &Value) -> Result<GeodesicScaffold> {
    if let Some(name) = v.get("builtin").and_then(|b| b.as_str()) {
        let count = v.get("count").and_then(|c| c.as_u64()).unwrap_or(14) as usize;
        let translation = v
            .get("translation")
            .and_then(|c| c.as_f64())
            .unwrap_or(1.0);
        return match name {
            "concentric-h2" => {
                let spacing = v.get("spacing").and_then(|c| c.as_f64()).unwrap_or(4.7);
                crate::limit::concentric_h2(count, spacing, translation)
            }
            "translated-h3" => {
                let spacing = v.get("spacing").and_then(|c| c.as_f64()).unwrap_or(12.0);
                let tilt = v.get("tilt").and_then(|c| c.as_f64()).unwrap_or(0.4);
                crate::limit::translated_h3(count, spacing, tilt, translation)
            }
            other => Err(Error::Parse(format!("unknown builtin scaffold {other:?}"))),
        };
    }
    let base = point_from_json(
        v.get("basepoint")
            .ok_or_else(|| Error::Parse("scaffold: missing \"basepoint\"".into()))?,
    )?;
    let gens = v
        .get("generators")
        .and_then(|g| g.as_array())
        .ok_or_else(|| Error::Parse("scaffold: missing \"generators\"".into()))?
        .iter()
        .map(isometry_from_json)
        .collect::<Result<Vec<_>>>()?;
    GeodesicScaffold::from_world(base, gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_round_trip() {
        let p = HPoint::origin(3);
        let v = point_to_json(&p);
        let q = point_from_json(&v).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn sl2_shorthand_real_and_complex() {
        let v = serde_json::json!({"sl2": [[1.0, 1.0], [0.0, 1.0]], "field": "R"});
        let g = isometry_from_json(&v).unwrap();
        assert_eq!(g.dim(), 2);
        assert!(g.classify().is_parabolic());
        let v = serde_json::json!({"sl2": [[[1.0,0.0], [0.0,1.0]], [[0.0,0.0], [1.0,0.0]]], "field": "C"});
        let g = isometry_from_json(&v).unwrap();
        assert_eq!(g.dim(), 3);
        assert!(g.classify().is_parabolic());
    }

    #[test]
    fn matrix_document_round_trip() {
        let g = Isometry::boost(2, 1, 0.8).unwrap();
        let v = isometry_to_json(&g);
        let h = isometry_from_json(&v).unwrap();
        assert!((g.matrix() - h.matrix()).amax() < 1e-15);
    }

    #[test]
    fn malformed_documents_are_parse_errors() {
        for bad in [
            serde_json::json!({"matrix": [1, 0, 0, 1]}),
            serde_json::json!({"dim": 2, "matrix": [1, 0, 0, 1]}),
            serde_json::json!({"sl2": [[1, 0]], "field": "R"}),
        ] {
            assert!(matches!(isometry_from_json(&bad), Err(Error::Parse(_))));
        }
        // Non-Lorentz matrix is a model error, not a parse error.
        let v = serde_json::json!({"dim": 2, "matrix": [1.0,0.2,0.0, 0.0,1.0,0.0, 0.0,0.0,1.0]});
        assert!(matches!(isometry_from_json(&v), Err(Error::Model(_))));
    }
}
