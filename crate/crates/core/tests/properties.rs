use mlab_core::catalog::{self, make_logspiral_curve};
use mlab_core::deform::{metrical_deform, t_transform};
use mlab_core::hazzidakis::{self, BonnetType};
use mlab_core::invariants::{ConformalData, MetricalData};
use mlab_core::numgrid::{self, ConformalChart, ScalarField};
use mlab_core::residuals;
use mlab_core::simcurve::{self, SimCurvatureState};
use mlab_core::Tolerances;
use num_complex::Complex64;
use proptest::prelude::*;

fn small_chart() -> ConformalChart {
    ConformalChart::spanning((-0.5, 0.5), (-0.5, 0.5), 24, 24, false, false).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn holomorphic_cubics_have_no_zbar_derivative(
        a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0, d in -2.0f64..2.0,
    ) {
        let chart = small_chart();
        let p = ScalarField::from_fn(chart, |z| a + b * z + Complex64::new(0.0, c) * z * z + d * z * z * z);
        let dz = numgrid::d_zbar(&p);
        for k in chart.interior_indices(numgrid::BOUNDARY_COLLAR) {
            prop_assert!(dz.values()[k].norm() < 1e-11 * p.scale());
        }
    }

    #[test]
    fn similarity_curvature_is_similarity_invariant(
        scale in 0.2f64..5.0, angle in -3.0f64..3.0, bx in -5.0f64..5.0, by in -5.0f64..5.0,
    ) {
        let c = make_logspiral_curve(0.3, 1.0, 2.0, 400).unwrap();
        let moved = c.transformed(scale, angle, Complex64::new(bx, by)).unwrap();
        let a = simcurve::similarity_curvature(&c).unwrap();
        let b = simcurve::similarity_curvature(&moved).unwrap();
        for k in c.nested_interior() {
            // the rounding floor of third differences, not any geometric term
            prop_assert!((a[k] - b[k]).abs() < 1e-7);
        }
    }

    #[test]
    fn metrical_deform_preserves_ratio_and_moebius_metric(
        a in 0.1f64..0.6, theta in -3.0f64..3.0, r in 0.5f64..2.0,
    ) {
        // lambda = r e^{i theta} (1 + a z)^2 is holomorphic and zero-free on the chart
        let e = catalog::by_name("logspiral-cylinder").unwrap();
        let chart = e.chart(32).unwrap();
        let [omega, mean, _, hopf, _] = e.closed_form_fields(&chart).unwrap();
        let md = MetricalData::new(omega, mean, hopf).unwrap();
        let (x0, _) = chart.point(0);
        let lambda = ScalarField::from_fn(chart, |z| {
            let w = 1.0 + a * (z - x0) / 4.0;
            Complex64::from_polar(r, theta) * w * w
        });
        let (out, _, _) = metrical_deform(&md, &lambda).unwrap();
        let f0 = md.mobius_factor();
        let f1 = out.mobius_factor();
        prop_assert!(f0.max_abs_diff(&f1, None).unwrap() <= 1e-12 * f0.scale());
        let r0 = md.similarity_ratio();
        let r1 = out.similarity_ratio();
        for k in 0..chart.len() {
            if !r0.mask[k] && !r1.mask[k] {
                prop_assert!((r0.field.values()[k] - r1.field.values()[k]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn t_transform_keeps_isothermic_form(r in -3.0f64..3.0) {
        let e = catalog::by_name("enneper").unwrap();
        let cd = e.conformal_data(&e.chart(32).unwrap()).unwrap();
        let tols = Tolerances::default();
        let (out, _) = t_transform(&cd, r, &tols).unwrap();
        prop_assert!(residuals::isothermic_form_residual(&out, &tols).pass);
        let d = out.schwarzian.max_abs_diff(&cd.schwarzian, None).unwrap();
        prop_assert!((d - r.abs()).abs() < 1e-13);
    }

    #[test]
    fn constant_unimodular_multiplier_is_admissible(theta in -3.2f64..3.2) {
        let l = ScalarField::constant(small_chart(), Complex64::from_polar(1.0, theta));
        prop_assert!(residuals::multiplier_residual(&l, &Tolerances::default()).max_abs < 1e-14);
    }

    #[test]
    fn hazzidakis_rhs_solves_the_equation(
        s in 0.2f64..1.3, h in -3.0f64..3.0, hs in -3.0f64..-0.1, hss in -3.0f64..3.0,
    ) {
        for kind in [BonnetType::A, BonnetType::B, BonnetType::C] {
            let hsss = hazzidakis::hazzidakis_rhs(s, h, hs, hss, kind).unwrap();
            let r = hazzidakis::equation_residual(s, h, hs, hss, hsss, kind);
            prop_assert!(r.abs() < 1e-10 * (1.0 + hsss.abs()), "{kind:?}: {r}");
        }
    }

    #[test]
    fn flat_solutions_are_exact(km in -5.0f64..-0.05, s in 0.05f64..20.0) {
        let [h, hs, hss, hsss] = hazzidakis::flat_bonnet_solution(km, s).unwrap();
        let r = hazzidakis::equation_residual(s, h, hs, hss, hsss, BonnetType::C);
        prop_assert!(r.abs() <= 1e-12 * hsss.abs().max(1.0), "{r}");
    }

    #[test]
    fn burgers_conserves_the_mean(amp in 0.1f64..1.0, phase in 0.0f64..6.3, mode in 1usize..4) {
        let tau = std::f64::consts::TAU;
        let u0 = SimCurvatureState::from_fn(128, tau, |s| amp * (mode as f64 * s + phase).sin() + 0.2).unwrap();
        let t = 0.1;
        let u1 = simcurve::burgers_evolve_to(&u0, t).unwrap();
        prop_assert!((u1.mean() - u0.mean()).abs() < 1e-8 * t);
    }

    #[test]
    fn constant_states_are_fixed(c in -3.0f64..3.0, f in -2.0f64..2.0, a in -1.0f64..1.0) {
        let u = SimCurvatureState::new(vec![c; 64], 1.0).unwrap();
        let rhs = simcurve::evolution_rhs(&u, &simcurve::Speed::Constant(f), a).unwrap();
        prop_assert!(rhs.iter().all(|v| *v == 0.0));
    }
}

fn flat_error(step: f64) -> f64 {
    let km = -1.0;
    let s0 = 0.5;
    let [h, hs, hss, _] = hazzidakis::flat_bonnet_solution(km, s0).unwrap();
    let sol = hazzidakis::integrate(BonnetType::C, s0, [h, hs, hss], 2.0, step).unwrap();
    let last = sol.len() - 1;
    let exact = hazzidakis::flat_bonnet_solution(km, sol.s[last]).unwrap()[0];
    (sol.h[last] - exact).abs()
}

#[test]
fn rk4_halving_gains_fourth_order() {
    let coarse = flat_error(0.02);
    let fine = flat_error(0.01);
    assert!(coarse / fine >= 14.0, "{coarse:e} {fine:e}");
}

#[test]
fn rk4_runs_backwards() {
    let [h, hs, hss, _] = hazzidakis::flat_bonnet_solution(-2.0, 1.5).unwrap();
    let fwd = hazzidakis::integrate(BonnetType::C, 1.5, [h, hs, hss], 0.5, 1e-3);
    assert!(fwd.is_err());
    let back = hazzidakis::integrate(BonnetType::C, 1.5, [h, hs, hss], 0.5, -1e-3).unwrap();
    let last = back.len() - 1;
    let exact = hazzidakis::flat_bonnet_solution(-2.0, back.s[last]).unwrap();
    assert!((back.h[last] - exact[0]).abs() < 1e-9);
}

#[test]
fn zero_q_constrained_willmore_is_willmore() {
    let e = catalog::by_name("enneper").unwrap();
    let cd: ConformalData = e.conformal_data(&e.chart(40).unwrap()).unwrap();
    let tols = Tolerances::default();
    let a = residuals::willmore_residual(&cd, &tols);
    let b = residuals::constrained_willmore_residual(&cd, &tols);
    assert_eq!(a.max_abs.to_bits(), b.max_abs.to_bits());
    assert_eq!(a.l2.to_bits(), b.l2.to_bits());
}
