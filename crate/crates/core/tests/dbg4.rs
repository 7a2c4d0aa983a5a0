use hyperboloid::quasigeodesic::*;
use hyperboloid::isometry::Isometry;
use hyperboloid::geodesic::{GeodesicSegment, project_to_geodesic, dist};
use nalgebra::DVector;

fn e(i: usize, n: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

#[test]
fn small_l_path() {
    // Two edges of length 2 at a right angle; desk-scale brute force cross-check.
    let path = PiecewisePath::from_turtle(
        Isometry::identity(2),
        vec![(e(1,3), 2.0), (e(2,3), 2.0)],
    ).unwrap();
    let h = morse_fellow_travel(&path, 0.005).unwrap();
    // Brute force in world coords.
    let verts = path.vertices_world();
    let a = verts[0].as_interior().unwrap().clone();
    let b = verts[2].as_interior().unwrap().clone();
    let chord = GeodesicSegment::between(&a, &b).unwrap();
    let mut sup1 = 0.0f64; // path -> chord
    for k in 0..=800 {
        let s = 4.0 * k as f64 / 800.0;
        let p = path.point_world(s).unwrap();
        let (_, d) = project_to_geodesic(&p, &chord).unwrap();
        sup1 = sup1.max(d);
    }
    let mut sup2 = 0.0f64; // chord -> path
    for k in 0..=800 {
        let t = chord.length() * k as f64 / 800.0;
        let c = chord.eval(t).unwrap();
        let mut best = f64::INFINITY;
        for j in 0..=800 {
            let s = 4.0 * j as f64 / 800.0;
            best = best.min(dist(&c, &path.point_world(s).unwrap()));
        }
        sup2 = sup2.max(best);
    }
    println!("kernel {h}  brute path->chord {sup1}  chord->path {sup2}");
    assert!((h - sup1.max(sup2)).abs() < 0.02, "kernel {h} vs brute {}", sup1.max(sup2));
}
