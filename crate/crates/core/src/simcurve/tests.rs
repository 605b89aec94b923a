use super::*;
use crate::catalog::{make_circle, make_logspiral_curve};

#[test]
fn circle_curvatures() {
    let c = make_circle(2.0, 256).unwrap();
    let k = euclidean_curvature(&c).unwrap();
    assert!(k.iter().all(|v| (v - 0.5).abs() < 1e-6));
    let ks = similarity_curvature(&c).unwrap();
    assert!(ks.iter().all(|v| v.abs() < 1e-6));
}

#[test]
fn log_spiral_has_constant_similarity_curvature() {
    // 1/kappa_E = c2 - c1 sigma gives (kappa_E)_sigma / kappa_E^2 = c1.
    let c = make_logspiral_curve(0.3, 1.0, 2.0, 800).unwrap();
    let ks = similarity_curvature(&c).unwrap();
    for k in c.nested_interior() {
        assert!((ks[k] - 0.3).abs() < 1e-6, "{} at {k}", ks[k]);
    }
}

#[test]
fn angle_function_of_log_spiral() {
    // s(sigma) = -log(1 - c1 sigma)/c1 for c2 = 1
    let c = make_logspiral_curve(0.3, 1.0, 2.0, 800).unwrap();
    let s = angle_parameter(&c).unwrap();
    let sigma = 2.0;
    let exact = -(1.0f64 - 0.3 * sigma).ln() / 0.3;
    assert!((s[799] - exact).abs() < 1e-4, "{}", s[799]);
}

#[test]
fn similarity_invariance() {
    let c = make_logspiral_curve(0.3, 1.0, 2.0, 400).unwrap();
    let moved = c.transformed(3.0, 0.7, Complex64::new(1.0, -2.0)).unwrap();
    let a = similarity_curvature(&c).unwrap();
    let b = similarity_curvature(&moved).unwrap();
    for k in c.nested_interior() {
        // third-order stencils put the rounding floor near eps / ds^3
        assert!((a[k] - b[k]).abs() < 1e-7, "{} {}", a[k], b[k]);
    }
}

#[test]
fn arclength_is_validated() {
    let pts: Vec<Complex64> = (0..32).map(|k| Complex64::new(2.0 * k as f64 * 0.1, 0.0)).collect();
    assert!(PlaneCurveSamples::new(ParamKind::EuclideanArclength, 0.1, 0.0, pts, false).is_err());
}

#[test]
fn inflection_is_reported() {
    let h = 0.05;
    let pts: Vec<Complex64> = (0..64)
        .map(|k| {
            let x = -1.6 + k as f64 * h;
            Complex64::new(x, x * x * x)
        })
        .collect();
    let c = PlaneCurveSamples::new(ParamKind::SimilarityArclength, h, 0.0, pts, false).unwrap();
    assert!(matches!(similarity_curvature(&c), Err(Error::Inflection { .. })));
}

#[test]
fn reconstruction_closes_for_zero_curvature() {
    // u = 0 is a circle traversed once per 2 pi.
    let n = 256;
    let u = vec![0.0; n];
    let ds = 2.0 * std::f64::consts::PI / n as f64;
    let c = reconstruct_curve(&u, ds, true, CurveStart::default()).unwrap();
    let gap = (c.points[n] - c.points[0]).norm();
    assert!(gap < 1e-6, "{gap}");
}

#[test]
fn cole_hopf_at_time_zero() {
    // phi = 2 + cos s, u = -phi_s / phi = sin s / (2 + cos s)
    for s in [0.0, 0.3, 1.7, 4.0] {
        assert!((cole_hopf(s, 0.0, 1.0, 2.0) - s.sin() / (2.0 + s.cos())).abs() < 1e-15);
    }
}

#[test]
fn burgers_step_limit() {
    let u = SimCurvatureState::from_fn(64, 2.0 * std::f64::consts::PI, |s| s.sin()).unwrap();
    let limit = STABILITY_FACTOR * u.ds() * u.ds();
    assert!(matches!(burgers_evolve(&u, 2.0 * limit, 1), Err(Error::StepSize { .. })));
    assert!(burgers_evolve(&u, limit, 3).is_ok());
}

#[test]
fn burgers_rhs_sign() {
    // f = -1, a = 0: u_t = u_ss - 2 u u_s
    let u = SimCurvatureState::from_fn(256, 2.0 * std::f64::consts::PI, |s| s.sin()).unwrap();
    let r = evolution_rhs(&u, &Speed::Constant(-1.0), 0.0).unwrap();
    for (k, s) in u.grid().iter().enumerate() {
        let exact = -s.sin() - 2.0 * s.sin() * s.cos();
        assert!((r[k] - exact).abs() < 1e-6);
    }
}

#[test]
fn speed_samples_reduce_to_constant() {
    let u = SimCurvatureState::from_fn(128, 2.0 * std::f64::consts::PI, |s| 0.3 * s.cos()).unwrap();
    let a = evolution_rhs(&u, &Speed::Constant(0.7), 0.5).unwrap();
    let b = evolution_rhs(&u, &Speed::Samples(vec![0.7; 128]), 0.5).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-10);
    }
    assert!(evolution_rhs(&u, &Speed::Samples(vec![0.7; 3]), 0.5).is_err());
}

#[test]
fn consistency_report() {
    let u0 = SimCurvatureState::from_fn(256, 2.0 * std::f64::consts::PI, |s| cole_hopf(s, 0.0, 1.0, 2.0)).unwrap();
    let r = geometric_consistency(&u0, 0.1).unwrap();
    assert!((r.mean_initial - r.mean_final).abs() < 1e-10);
    assert!(r.frenet_residual_initial < 1e-4 && r.frenet_residual_final < 1e-4);
}
