use hyperboloid::quasigeodesic::*;
use hyperboloid::isometry::Isometry;
use hyperboloid::geodesic::dist;
use nalgebra::DVector;

fn e(i: usize, n: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

#[test]
fn medium_zigzag() {
    // 8 edges length 2.2: total 17.6, still inside the raw-coordinate envelope.
    let parts: Vec<_> = (0..8).map(|k| (e(1 + (k % 2), 3), 2.2)).collect();
    let path = PiecewisePath::from_turtle(Isometry::identity(2), parts).unwrap();
    let h = morse_fellow_travel(&path, 0.01).unwrap();
    // brute force both sides
    let total = path.total_length();
    let verts = path.vertices_world();
    let a = verts[0].as_interior().unwrap().clone();
    let b = verts[verts.len()-1].as_interior().unwrap().clone();
    let chord = hyperboloid::geodesic::GeodesicSegment::between(&a, &b).unwrap();
    let mut sup1 = 0.0f64;
    for k in 0..=1600 {
        let s = total * k as f64 / 1600.0;
        let p = path.point_world(s).unwrap();
        let (_, d) = hyperboloid::geodesic::project_to_geodesic(&p, &chord).unwrap();
        sup1 = sup1.max(d);
    }
    let mut sup2 = 0.0f64;
    for k in 0..=1600 {
        let t = chord.length() * k as f64 / 1600.0;
        let c = chord.eval(t).unwrap();
        let mut best = f64::INFINITY;
        for j in 0..=1600 {
            let s = total * j as f64 / 1600.0;
            best = best.min(dist(&c, &path.point_world(s).unwrap()));
        }
        sup2 = sup2.max(best);
    }
    println!("kernel {h} brute {} {}", sup1, sup2);
    assert!((h - sup1.max(sup2)).abs() < 0.03, "kernel {h} vs brute {}", sup1.max(sup2));
}
