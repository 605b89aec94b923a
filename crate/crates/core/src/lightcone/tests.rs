use super::*;
use crate::catalog;

#[test]
fn lift_is_null() {
    for name in catalog::NAMES {
        let p = catalog::by_name(name).unwrap().patch(16).unwrap();
        let (worst, ok) = euclidean_lift(&p).lightcone_check();
        assert!(ok && worst < 1e-12, "{name}: {worst}");
    }
}

#[test]
fn dilated_plane_normalization() {
    // The lift metric factor of (2x, 2y, 0) is 4, so mu = 1/2.
    let p = catalog::make_plane(2.0).unwrap().patch(16).unwrap();
    let phi = euclidean_lift(&p);
    let psi = normalized_lift(&p).unwrap();
    for (a, b) in phi.jets.iter().zip(&psi.jets) {
        for c in 0..5 {
            assert!((b.v.0[c] - 0.5 * a.v.0[c]).abs() < 1e-14);
        }
    }
    let nodes: Vec<usize> = (0..p.chart().len()).collect();
    let (dev, _) = psi.normalization_check(&nodes);
    assert!(dev < 1e-12);
}

#[test]
fn graph_patch_is_not_normalizable() {
    let p = catalog::make_saddle().patch(16).unwrap();
    assert!(matches!(normalized_lift(&p), Err(Error::Domain(_))));
}

#[test]
fn hill_on_the_cylinder() {
    let p = catalog::by_name("cylinder").unwrap().patch(32).unwrap();
    let psi = normalized_lift(&p).unwrap();
    let hill = hill_decomposition(&psi).unwrap();
    for k in 0..p.chart().len() {
        assert!((hill.kappa_norm.values()[k].re - 0.25).abs() < 1e-12);
        // c = -2 <psi_zz, psi_hat>
        assert!((hill.c.values()[k] - 0.25).norm() < 1e-12);
    }
    assert!(hill.tangential_residual(&psi) < 1e-12);
    let n = hill.nodes[0];
    assert!(mink_dot(&n.dual, &n.dual).abs() < 1e-12);
    assert!((mink_dot(&n.dual, &psi.jets[0].v) + 1.0).abs() < 1e-12);
    assert!((mink_dot(&n.sphere, &n.sphere) - 1.0).abs() < 1e-12);
}

#[test]
fn hill_needs_normalized_lift() {
    let p = catalog::by_name("cylinder").unwrap().patch(16).unwrap();
    assert!(hill_decomposition(&euclidean_lift(&p)).is_err());
}

#[test]
fn sphere_congruence_is_constant() {
    let p = catalog::by_name("sphere").unwrap().patch(24).unwrap();
    let s = central_sphere_congruence(&p).unwrap();
    let v0 = s.values[0];
    for v in &s.values {
        for c in 0..5 {
            assert!((v.0[c] - v0.0[c]).abs() < 1e-10);
        }
    }
}

#[test]
fn cylinder_congruence_is_de_sitter() {
    let p = catalog::by_name("cylinder").unwrap().patch(32).unwrap();
    let check = congruence_check(&p).unwrap();
    assert!(check.de_sitter < 1e-8);
    assert!(check.incidence < 1e-12);
}

#[test]
fn mean_curvature_vector_of_spheres() {
    let v = MinkVec::basis(1);
    let zero = sphere_mean_curvature_vector(&v, &(v * 3.0)).unwrap();
    assert!(zero.max_abs() < 1e-15);
    assert!(sphere_mean_curvature_vector(&(v * 2.0), &v).is_err());
    let hv = sphere_mean_curvature_vector(&v, &MinkVec::basis(0)).unwrap();
    assert_eq!(hv.0, [-1.0, 1.0, 0.0, 0.0, 0.0]);
    let hv = sphere_mean_curvature_vector(&v, &MinkVec::basis(2)).unwrap();
    assert_eq!(hv.0, [0.0, -1.0, -1.0, 0.0, 0.0]);
}

#[test]
fn csv_header() {
    let p = catalog::by_name("cylinder").unwrap().patch(8).unwrap();
    let s = central_sphere_congruence(&p).unwrap();
    let mut out = Vec::new();
    s.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("i,j,c0,c1,c2,c3,c4\n"));
    assert_eq!(text.lines().count(), 65);
}

#[test]
fn minkowski_signature() {
    let e0 = MinkVec::basis(0);
    let e4 = MinkVec::basis(4);
    assert_eq!(mink_dot(&e0, &e0) * mink_dot(&e4, &e4), -1.0);
    let p = lift_point(&crate::invariants::V3::new(0.3, -1.0, 2.0));
    assert!(mink_dot(&p, &p).abs() < 1e-14);
}
