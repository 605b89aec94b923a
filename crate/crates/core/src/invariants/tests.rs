use super::*;
use crate::catalog;

fn invariants_of(name: &str, n: usize) -> SurfaceInvariants {
    SurfaceInvariants::compute(&catalog::by_name(name).unwrap().patch(n).unwrap()).unwrap()
}

fn max_dev(f: &ScalarField, target: impl Fn(usize) -> Complex64, nodes: &[usize]) -> f64 {
    nodes.iter().map(|&k| (f.values()[k] - target(k)).norm()).fold(0.0, f64::max)
}

#[test]
fn cylinder_of_radius_two() {
    // H = 1/(2r), Q = -1/(4r), c = 2HQ since omega = 0.
    let inv = SurfaceInvariants::compute(&catalog::make_cylinder(2.0).unwrap().patch(32).unwrap()).unwrap();
    let all: Vec<usize> = (0..inv.chart.len()).collect();
    assert!(max_dev(&inv.mean, |_| Complex64::new(0.25, 0.0), &all) < 1e-13);
    assert!(max_dev(&inv.gauss, |_| Complex64::new(0.0, 0.0), &all) < 1e-13);
    assert!(max_dev(&inv.hopf, |_| Complex64::new(-0.125, 0.0), &all) < 1e-13);
    assert!(max_dev(&inv.kappa, |_| Complex64::new(-0.125, 0.0), &all) < 1e-13);
    assert!(max_dev(&inv.schwarzian, |_| Complex64::new(-1.0 / 16.0, 0.0), &all) < 1e-12);
    assert!(inv.conformality_residual < 1e-12);
}

#[test]
fn cylinder_moebius_area() {
    // (H^2 - K) e^omega = 1/4 over [0,1] x [0, 2 pi).
    let inv = invariants_of("cylinder", 64);
    assert!((inv.mobius_area() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
}

#[test]
fn sphere_is_totally_umbilic() {
    let inv = invariants_of("sphere", 64);
    assert!(inv.kappa.max_abs() < 1e-10);
    assert!(inv.umbilic.iter().all(|&u| u));
    assert!(inv.mobius_curvature().all_masked());
    // inward normal by default
    assert!(max_dev(&inv.mean, |_| Complex64::new(1.0, 0.0), &(0..inv.chart.len()).collect::<Vec<_>>()) < 1e-10);
}

#[test]
fn enneper_conformal_hopf() {
    // e^omega = (1+|z|^2)^2 and Q = -1, so kappa = -1/(1+|z|^2).
    let inv = invariants_of("enneper", 48);
    let nodes: Vec<usize> = (0..inv.chart.len()).collect();
    let chart = inv.chart;
    let target = |k: usize| {
        let (x, y) = chart.point(k);
        Complex64::new(-1.0 / (1.0 + x * x + y * y), 0.0)
    };
    assert!(max_dev(&inv.kappa, target, &nodes) < 1e-12);
    assert!(inv.mean.max_abs() < 1e-12);
}

#[test]
fn dilated_plane_factor() {
    let inv = SurfaceInvariants::compute(&catalog::make_plane(2.0).unwrap().patch(16).unwrap()).unwrap();
    let w = 4.0f64.ln();
    assert!(inv.omega.values().iter().all(|v| (v.re - w).abs() < 1e-14));
    assert!(inv.mobius_factor.max_abs() < 1e-20);
}

#[test]
fn moebius_curvature_values() {
    // Log-spiral cylinder: K_M = -4 c1^2 with c1 = 0.3.
    let inv = invariants_of("logspiral-cylinder", 96);
    let km = inv.mobius_curvature();
    let nodes = km.valid_interior();
    assert!(!nodes.is_empty());
    assert!(max_dev(&km.field, |_| Complex64::new(-0.36, 0.0), &nodes) < 1e-5);
    // Enneper: 4|kappa|^2 |dz|^2 = 4|dz|^2/(1+|z|^2)^2, the unit sphere.
    let inv = invariants_of("enneper", 96);
    let km = inv.mobius_curvature();
    assert!(max_dev(&km.field, |_| Complex64::new(1.0, 0.0), &km.valid_interior()) < 1e-4);
}

fn schwarzian_error(n: usize, f: fn(Complex64) -> Complex64, exact: f64) -> f64 {
    let chart = ConformalChart::spanning((0.0, 1.0), (0.0, 1.0), n, n, false, false).unwrap();
    let s = schwarzian_derivative_of_map(&ScalarField::from_fn(chart, f));
    let nodes = chart.interior_indices(2 * BOUNDARY_COLLAR);
    max_dev(&s.field, |_| Complex64::new(exact, 0.0), &nodes)
}

#[test]
fn schwarzian_of_maps() {
    // Moebius maps have S = 0 and S(e^z) = -1/2; errors shrink until rounding takes over.
    let mobius: fn(Complex64) -> Complex64 = |z| (2.0 * z + 1.0) / (z + 3.0);
    let exp: fn(Complex64) -> Complex64 = |z| z.exp();
    for (f, exact) in [(mobius, 0.0), (exp, -0.5)] {
        let e = [32, 64, 128].map(|n| schwarzian_error(n, f, exact));
        assert!(e.iter().all(|&v| v < 1e-6), "{e:?}");
        assert!(e[1] < e[0] / 3.0, "{e:?}");
    }
}

#[test]
fn calapso_rejects_excess_gauss_curvature() {
    let chart = ConformalChart::spanning((0.0, 1.0), (0.0, 1.0), 8, 8, false, false).unwrap();
    let h = ScalarField::constant(chart, Complex64::new(1.0, 0.0));
    let k = ScalarField::constant(chart, Complex64::new(2.0, 0.0));
    assert!(matches!(calapso_potential(&h, &k), Err(Error::InconsistentCurvature { .. })));
}

#[test]
fn metrical_and_geometric_gauss_agree() {
    let inv = invariants_of("enneper", 64);
    let md = inv.metrical_data();
    let k = md.gauss_curvature();
    let d = k.max_abs_diff(&inv.gauss, None).unwrap() / inv.gauss.scale();
    assert!(d < 1e-10, "{d}");
    let intrinsic = md.intrinsic_curvature();
    let nodes = inv.chart.interior_indices(BOUNDARY_COLLAR);
    assert!(intrinsic.max_abs_diff(&inv.gauss, Some(&nodes)).unwrap() / inv.gauss.scale() < 1e-4);
}

#[test]
fn similarity_ratio_masks_minimal_points() {
    let inv = invariants_of("enneper", 16);
    assert!(inv.similarity_ratio().all_masked());
    let r = invariants_of("sphere", 16).similarity_ratio();
    assert!(r.field.values().iter().all(|v| (v.re - 1.0).abs() < 1e-10));
}

#[test]
fn fubini_second_form_is_trace_free() {
    let inv = invariants_of("cylinder", 16);
    let f = inv.fubini_forms();
    let tr = f.trace(&inv.omega).unwrap();
    assert!(tr.max_abs() < 1e-12, "{}", tr.max_abs());
}

#[test]
fn principal_angle_of_real_hopf() {
    let inv = invariants_of("cylinder", 16);
    // Q < 0: the principal frame is rotated a quarter turn from the chart axes.
    let a = principal_angle(&inv.hopf);
    assert!(a.values().iter().all(|v| (v.re.abs() - std::f64::consts::FRAC_PI_2).abs() < 1e-12));
}
