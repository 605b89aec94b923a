use super::*;
use crate::numgrid;
use crate::invariants::SurfaceInvariants;

#[test]
fn names_resolve() {
    for name in NAMES {
        let e = by_name(name).unwrap();
        assert_eq!(e.name, name);
    }
    assert!(matches!(by_name("torus"), Err(Error::Domain(_))));
}

#[test]
fn parameter_domains() {
    assert!(make_cylinder(0.0).is_err());
    assert!(make_round_sphere(-1.0, false).is_err());
    assert!(make_logspiral_cylinder(0.0, 1.0).is_err());
    assert!(make_logspiral_cylinder(0.3, -1.0).is_err());
    assert!(make_paraboloid(0.0).is_err());
    assert!(make_circle(0.0, 64).is_err());
    assert!(make_logspiral_curve(0.5, 1.0, 2.5, 64).is_err());
}

#[test]
fn paraboloid_apex_on_a_node() {
    let chart = make_paraboloid(1.0).unwrap().chart(64).unwrap();
    assert_eq!(chart.nx % 2, 1);
    let mid = chart.index(chart.nx / 2, chart.ny / 2);
    let (x, y) = chart.point(mid);
    assert!(x.abs() < 1e-15 && y.abs() < 1e-15);
}

/// Exact derivatives against 4th-order stencils of the sampled closed forms.
#[test]
fn conformal_derivatives_match_stencils() {
    for name in ["enneper", "logspiral-cylinder", "cylinder"] {
        let e = by_name(name).unwrap();
        let chart = e.chart(96).unwrap();
        let cd = e.conformal_data(&chart).unwrap();
        let d = cd.derivatives.as_ref().unwrap();
        let nodes = chart.interior_indices(4);
        let pairs = [
            (numgrid::d_z(&cd.kappa), &d.kappa_z),
            (numgrid::d_zbar(&cd.kappa), &d.kappa_zbar),
            (numgrid::d_zbar_zbar(&cd.kappa), &d.kappa_zbar_zbar),
            (numgrid::d_zbar(&cd.schwarzian), &d.c_zbar),
        ];
        for (fd, exact) in pairs {
            let err = fd.max_abs_diff(exact, Some(&nodes)).unwrap();
            assert!(err < 1e-5, "{name}: {err}");
        }
    }
}

#[test]
fn closed_forms_match_invariants() {
    for name in ["cylinder", "sphere", "enneper", "logspiral-cylinder", "plane"] {
        let e = by_name(name).unwrap();
        let p = e.patch(40).unwrap();
        let inv = SurfaceInvariants::compute(&p).unwrap();
        let [omega, mean, gauss, hopf, calapso] = e.closed_form_fields(p.chart()).unwrap();
        for (a, b) in [
            (&omega, &inv.omega),
            (&mean, &inv.mean),
            (&gauss, &inv.gauss),
            (&hopf, &inv.hopf),
            // the square root amplifies cancellation near umbilics
            (&calapso.map_real(|h| h.re * h.re), &inv.calapso.map_real(|h| h.re * h.re)),
        ] {
            let d = a.max_abs_diff(b, None).unwrap();
            assert!(d < 1e-10 * a.scale(), "{name} {:?}: {d} {}", a.kind(), a.scale());
        }
    }
}

#[test]
fn catalog_schwarzian_matches_metrical_formula() {
    // c = omega_zz - omega_z^2/2 + 2HQ from the analytic jets.
    for name in ["cylinder", "enneper", "logspiral-cylinder", "sphere"] {
        let e = by_name(name).unwrap();
        let p = e.patch(40).unwrap();
        let inv = SurfaceInvariants::compute(&p).unwrap();
        let cd = e.conformal_data(p.chart()).unwrap();
        assert!(cd.schwarzian.max_abs_diff(&inv.schwarzian, None).unwrap() < 1e-10, "{name}");
        assert!(cd.kappa.max_abs_diff(&inv.kappa, None).unwrap() < 1e-10, "{name}");
    }
}

#[test]
fn enneper_schwarzian_closed_form() {
    // c = -4 zbar^2 / (1+|z|^2)^2
    let e = make_enneper();
    let chart = e.chart(24).unwrap();
    let cd = e.conformal_data(&chart).unwrap();
    for k in 0..chart.len() {
        let (x, y) = chart.point(k);
        let z = Complex64::new(x, y);
        let u = 1.0 + z.norm_sqr();
        assert!((cd.schwarzian.values()[k] + 4.0 * z.conj() * z.conj() / (u * u)).norm() < 1e-14);
    }
}

#[test]
fn himc_potentials() {
    for name in ["cylinder", "logspiral-cylinder"] {
        let e = by_name(name).unwrap();
        let chart = e.chart(32).unwrap();
        let h = e.himc_potential(&chart).unwrap();
        let [_, mean, ..] = e.closed_form_fields(&chart).unwrap();
        for k in 0..chart.len() {
            let lhs = 2.0 * h.values()[k].re;
            assert!((lhs - 1.0 / mean.values()[k].re).abs() < 1e-13);
        }
    }
    assert!(make_enneper().himc_potential(&make_enneper().chart(16).unwrap()).is_none());
}

#[test]
fn log_spiral_curve_is_arclength() {
    let c = make_logspiral_curve(0.3, 1.0, 2.0, 400).unwrap();
    let s = LogSpiral::new(0.3, 1.0).unwrap();
    let k = crate::simcurve::euclidean_curvature(&c).unwrap();
    for i in c.interior() {
        assert!((k[i] - s.curvature(i as f64 * c.h)).abs() < 1e-6);
    }
    // tangent angle grows like the angle function
    let [_, t, ..] = s.derivatives(1.0);
    assert!((t.arg() - s.angle(1.0)).abs() < 1e-12);
}

#[test]
fn graph_entries_are_flagged() {
    assert!(make_saddle().approximate);
    assert!(by_name("paraboloid").unwrap().approximate);
    assert!(!by_name("enneper").unwrap().approximate);
    let g = make_graph_surface("bump", |x, y| 0.1 * (x * x - y * y), ChartDomain::open((-1.0, 1.0), (-1.0, 1.0)));
    assert!(g.approximate && !g.has_analytic_jets());
}
