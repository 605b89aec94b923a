use mlab_core::catalog::{self, NAMES};
use mlab_core::invariants::{rotation, unit_sphere_inversion, Similarity, SurfaceInvariants, V3};
use mlab_core::numgrid::{self, ScalarField, BOUNDARY_COLLAR};
use mlab_core::residuals::{self, Verdict};
use mlab_core::{ConformalChart, Tolerances};
use num_complex::Complex64;

fn invariants(name: &str, n: usize) -> SurfaceInvariants {
    SurfaceInvariants::compute(&catalog::by_name(name).unwrap().patch(n).unwrap()).unwrap()
}

#[test]
fn similarities_fix_the_moebius_factor_and_ratio() {
    for name in ["enneper", "logspiral-cylinder", "cylinder"] {
        let e = catalog::by_name(name).unwrap();
        let chart = e.chart(48).unwrap();
        let moved = Similarity::new(
            e.immersion().unwrap(),
            2.5,
            rotation(V3::new(1.0, -2.0, 0.5), 0.9),
            V3::new(3.0, 1.0, -4.0),
        )
        .unwrap();
        let a = SurfaceInvariants::compute(&e.patch_on(chart).unwrap()).unwrap();
        let b = SurfaceInvariants::compute(&mlab_core::invariants::SurfacePatch::from_immersion(chart, &moved)).unwrap();
        // 4|kappa|^2 |dz|^2 does not see the scale at all
        let d = a.mobius_factor.max_abs_diff(&b.mobius_factor, None).unwrap();
        assert!(d < 1e-8 * a.mobius_factor.scale(), "{name}: {d}");
        let (ra, rb) = (a.similarity_ratio(), b.similarity_ratio());
        for k in 0..chart.len() {
            if !ra.mask[k] && !rb.mask[k] {
                assert!((ra.field.values()[k] - rb.field.values()[k]).norm() < 1e-8, "{name}");
            }
        }
    }
}

fn inversion_error(n: usize) -> f64 {
    let e = catalog::by_name("cylinder").unwrap();
    let p = e.patch(n).unwrap();
    let a = SurfaceInvariants::compute(&p).unwrap();
    let b = SurfaceInvariants::compute(&p.map_points(unit_sphere_inversion).unwrap()).unwrap();
    let nodes = a.chart.interior_indices(2 * BOUNDARY_COLLAR);
    a.mobius_factor.max_abs_diff(&b.mobius_factor, Some(&nodes)).unwrap() / a.mobius_factor.scale()
}

#[test]
fn inversion_fixes_the_moebius_metric() {
    let coarse = inversion_error(64);
    let fine = inversion_error(128);
    assert!(fine <= 1e-2, "{fine}");
    assert!(fine < coarse, "{coarse} {fine}");
}

#[test]
fn moebius_factor_routes_agree() {
    // 4|kappa|^2 against h^2 e^omega with h = sqrt(H^2 - K). Graph charts are
    // not conformal, so the two sides are different objects there.
    for name in NAMES {
        if catalog::by_name(name).unwrap().approximate {
            continue;
        }
        let inv = invariants(name, 48);
        let d = inv.mobius_factor.max_abs_diff(&inv.mobius_factor_metrical(), None).unwrap();
        assert!(d <= 1e-10 * inv.mobius_factor.scale(), "{name}: {d}");
    }
}

fn derivative_error(n: usize) -> f64 {
    let chart = ConformalChart::spanning((0.0, 1.0), (0.0, 1.0), n, n, false, false).unwrap();
    let f = ScalarField::from_fn(chart, |z| (z * 1.3).sin() * z.conj().exp());
    // d_z of sin(1.3 z) e^{conj z} is 1.3 cos(1.3 z) e^{conj z}
    let dz = numgrid::d_z(&f);
    let want = ScalarField::from_fn(chart, |z| 1.3 * (z * 1.3).cos() * z.conj().exp());
    let nodes = chart.interior_indices(BOUNDARY_COLLAR + 1);
    dz.max_abs_diff(&want, Some(&nodes)).unwrap()
}

#[test]
fn interior_stencils_are_fourth_order() {
    let (a, b) = (derivative_error(32), derivative_error(64));
    assert!((a / b).log2() >= 3.8, "{a:e} {b:e}");
}

#[test]
fn wirtinger_derivatives_commute() {
    let e = catalog::by_name("enneper").unwrap();
    let [omega, ..] = e.closed_form_fields(&e.chart(128).unwrap()).unwrap();
    let a = numgrid::d_z(&numgrid::d_zbar(&omega));
    let b = numgrid::d_zbar(&numgrid::d_z(&omega));
    assert!(a.max_abs_diff(&b, None).unwrap() <= 1e-8 * omega.scale());
}

#[test]
fn flags_match_verdicts() {
    let tols = Tolerances::default();
    for name in NAMES {
        let e = catalog::by_name(name).unwrap();
        let Some(cd) = e.conformal_data(&e.chart(128).unwrap()) else {
            continue;
        };
        let coarse = e.conformal_data(&e.chart(64).unwrap()).unwrap();
        let w = residuals::verdict(
            &residuals::willmore_residual(&cd, &tols),
            Some(&residuals::willmore_residual(&coarse, &tols)),
        );
        assert_eq!(w == Verdict::Pass, e.flags.willmore, "{name} willmore: {w:?}");
        let iso = residuals::isothermic_form_residual(&cd, &tols);
        assert_eq!(iso.pass, e.flags.isothermic, "{name} isothermic");
    }
}

#[test]
fn himc_flag_matches_residual() {
    let tols = Tolerances::default();
    for name in NAMES {
        let e = catalog::by_name(name).unwrap();
        if e.approximate || e.flags.umbilic {
            continue;
        }
        let inv = invariants(name, 128);
        if inv.mean.values().iter().any(|h| h.re.abs() < 1e-6) {
            assert!(!e.flags.himc, "{name}");
            continue;
        }
        let r = residuals::himc_residual(&inv.mean, &tols);
        assert_eq!(r.pass, e.flags.himc, "{name}: {}", r.max_abs);
    }
}

#[test]
fn enneper_conformal_factor() {
    let inv = invariants("enneper", 64);
    for k in 0..inv.chart.len() {
        let (x, y) = inv.chart.point(k);
        let want = (1.0 + x * x + y * y).powi(2).ln();
        assert!((inv.omega.values()[k] - Complex64::new(want, 0.0)).norm() < 1e-12);
    }
}
