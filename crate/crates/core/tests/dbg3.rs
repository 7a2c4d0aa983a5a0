use hyperboloid::quasigeodesic::*;
use hyperboloid::isometry::Isometry;
use hyperboloid::point::IdealPoint;
use nalgebra::DVector;

fn e(i: usize, n: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

#[test]
fn dbg_endpoint_gaps() {
    let theta = std::f64::consts::FRAC_PI_2;
    let level = long_edge_threshold(theta).unwrap();
    let mut parts: Vec<_> = (0..12).map(|k| (e(1 + (k % 2), 3), level + 0.3)).collect();
    parts.push((e(1, 3), f64::INFINITY));
    let path = PiecewisePath::from_turtle(Isometry::identity(2), parts).unwrap();
    let cert = certify(&path, CertMode::Long, theta, 1.0).unwrap();
    match ideal_endpoint(&path, &cert, 2.0, 1e-10) {
        Ok((xi, rep)) => println!("OK gap {} endpoint {:?}", rep.final_gap, xi.coords().as_slice()),
        Err(e) => {
            println!("ERR {e}");
            // manual trace
            let mut dir_prev: Option<IdealPoint> = None;
            for k in 0..10 {
                let t = 2f64.powi(k);
                if t > path.finite_length() + 200.0 { break; }
                let xi = path.ideal_direction(t.min(path.finite_length()+199.0)).unwrap();
                if let Some(p) = &dir_prev {
                    println!("t={t} gap {}", p.spherical_distance(&xi));
                }
                dir_prev = Some(xi);
            }
        }
    }
}

#[test]
fn dbg_fellow() {
    let theta = std::f64::consts::FRAC_PI_2;
    let level = long_edge_threshold(theta).unwrap();
    let parts: Vec<_> = (0..10).map(|k| (e(1 + (k % 2), 3), level + 0.1)).collect();
    let path = PiecewisePath::from_turtle(Isometry::identity(2), parts).unwrap();
    let h = morse_fellow_travel(&path, 0.02).unwrap();
    println!("H = {h}");
    // manual: distance from each vertex (world) to chord and vice versa at desk scale
    let verts = path.vertices_world();
    let n = verts.len();
    use hyperboloid::geodesic::{GeodesicSegment, project_to_geodesic};
    let a = verts[0].as_interior().unwrap();
    let b = verts[n-1].as_interior().unwrap();
    let chord = GeodesicSegment::between(a, b).unwrap();
    let mut sup = 0.0f64;
    for v in &verts {
        let (_, d) = project_to_geodesic(v.as_interior().unwrap(), &chord).unwrap();
        if d > sup { sup = d; }
    }
    println!("vertex sup to chord = {sup}  chord len {}", chord.length());
}
