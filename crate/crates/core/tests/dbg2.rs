use hyperboloid::limit::{concentric_h2, TauSequence};
use hyperboloid::point::IdealPoint;
use hyperboloid::margulis::{MargulisRegion, margulis_distance};
use hyperboloid::isometry::Isometry;

#[test]
fn dbg_endpoint() {
    let s = concentric_h2(2, 4.7, 1.0).unwrap();
    let tau = TauSequence::constant(1).unwrap();
    let (xi, _) = s.endpoint_map(&tau, &[1], 1e-8).unwrap();
    println!("endpoint {:?}", xi.coords().as_slice());
    let expect = IdealPoint::from_null(nalgebra::dvector![1.0, 0.0, 1.0]).unwrap();
    println!("spherical dist {}", xi.spherical_distance(&expect));
}

#[test]
fn dbg_margulis() {
    let eps = 0.5;
    let g1 = Isometry::from_sl2r(1.0, 3.0, 0.0, 1.0).unwrap();
    let g2 = Isometry::from_sl2r(1.0, 0.0, 3.0, 1.0).unwrap();
    let m1 = MargulisRegion::new(g1.clone(), eps).unwrap();
    let m2 = MargulisRegion::new(g2.clone(), eps).unwrap();
    println!("g1 class {:?}", g1.classify().name());
    println!("g2 class {:?}", g2.classify().name());
    println!("anchor1: {:?}", m1.anchor().map(|p| p.coords().as_slice().to_vec()));
    println!("anchor2: {:?}", m2.anchor().map(|p| p.coords().as_slice().to_vec()));
    let d = margulis_distance(&m1, &m2);
    println!("distance {d}");
    let expected = (9.0_f64 / (4.0 * (eps / 2.0_f64).sinh().powi(2))).ln();
    println!("expected {expected}");
}
