use super::*;
use crate::catalog;
use crate::invariants::SurfaceInvariants;
use crate::numgrid::ConformalChart;

fn tols() -> Tolerances {
    Tolerances::default()
}

fn chart() -> ConformalChart {
    ConformalChart::spanning((0.0, 1.0), (0.0, 1.0), 32, 32, false, false).unwrap()
}

fn constant(v: Complex64) -> ScalarField {
    ScalarField::constant(chart(), v)
}

fn real(v: f64) -> ScalarField {
    constant(Complex64::new(v, 0.0))
}

fn cylinder_cd() -> ConformalData {
    ConformalData::new(real(-0.25), real(-0.25), None).unwrap()
}

#[test]
fn t_transform_of_cylinder() {
    let (out, stamp) = t_transform(&cylinder_cd(), 1.0, &tols()).unwrap();
    assert!((out.schwarzian.values()[0] - 0.75).norm() < 1e-15);
    assert_eq!(out.kappa.values(), cylinder_cd().kappa.values());
    assert_eq!(stamp.family, Family::TTransform);
    assert!(residuals::isothermic_form_residual(&out, &tols()).max_abs < 1e-15);
    let (same, _) = t_transform(&cylinder_cd(), 0.0, &tols()).unwrap();
    assert_eq!(same.schwarzian.values(), cylinder_cd().schwarzian.values());
}

#[test]
fn t_transform_needs_real_kappa() {
    let cd = ConformalData::new(constant(Complex64::new(0.0, 0.3)), real(0.0), None).unwrap();
    assert!(matches!(t_transform(&cd, 1.0, &tols()), Err(Error::Domain(_))));
}

#[test]
fn t_transform_moves_c_by_r() {
    let e = catalog::by_name("enneper").unwrap();
    let cd = e.conformal_data(&e.chart(48).unwrap()).unwrap();
    for r in [-1.0, 0.5, 2.0] {
        let (out, _) = t_transform(&cd, r, &tols()).unwrap();
        let d = out.schwarzian.max_abs_diff(&cd.schwarzian, None).unwrap();
        assert!((d - r.abs()).abs() < 1e-14);
        let a = residuals::conformal_gauss_codazzi(&cd, &tols());
        let b = residuals::conformal_gauss_codazzi(&out, &tols());
        for (x, y) in a.iter().zip(&b) {
            assert!((x.max_abs - y.max_abs).abs() < 1e-12);
        }
    }
}

#[test]
fn constrained_willmore_family_on_cylinder() {
    let q = real(-0.125);
    let cd = cylinder_cd().with_q(q).unwrap();
    let (out, _) = constrained_willmore_family(&cd, Complex64::i(), &tols()).unwrap();
    let k = out.kappa.values()[0];
    let c = out.schwarzian.values()[0];
    let q = out.q.as_ref().unwrap().values()[0];
    assert!((k - Complex64::new(0.0, -0.25)).norm() < 1e-15);
    assert!(c.norm() < 1e-15);
    assert!((q - Complex64::new(0.0, -0.125)).norm() < 1e-15);
    // With q -> lambda q the deformed data miss the constrained Willmore
    // equation by -Re(conj(q') kappa') = -1/32; q -> lambda^2 q satisfies it.
    let w = residuals::constrained_willmore_residual(&out, &tols());
    assert!((w.max_abs - 1.0 / 32.0).abs() < 1e-15);
    let squared = out.clone().with_q(real(0.125)).unwrap();
    assert!(residuals::constrained_willmore_residual(&squared, &tols()).max_abs < 1e-15);
}

#[test]
fn willmore_family_keeps_schwarzian() {
    let e = catalog::by_name("enneper").unwrap();
    let cd = e.conformal_data(&e.chart(32).unwrap()).unwrap();
    for theta in [0.3, 1.0, 2.5] {
        let (out, _) = constrained_willmore_family(&cd, Complex64::from_polar(1.0, theta), &tols()).unwrap();
        assert_eq!(out.schwarzian.values(), cd.schwarzian.values());
        assert!(residuals::willmore_residual(&out, &tols()).max_abs < 1e-12);
    }
    let (id, _) = constrained_willmore_family(&cd, Complex64::new(1.0, 0.0), &tols()).unwrap();
    assert_eq!(id.kappa.values(), cd.kappa.values());
}

#[test]
fn family_parameter_must_be_unimodular() {
    let r = constrained_willmore_family(&cylinder_cd(), Complex64::new(1.1, 0.0), &tols());
    assert!(matches!(r, Err(Error::Domain(_))));
}

fn cylinder_md() -> MetricalData {
    MetricalData::new(real(0.0), real(0.5), real(-0.25)).unwrap()
}

#[test]
fn metrical_deform_examples() {
    let (id, rep, _) = metrical_deform(&cylinder_md(), &real(1.0)).unwrap();
    assert_eq!(id.hopf.values(), cylinder_md().hopf.values());
    assert!(rep.log_modulus_laplacian < 1e-15);
    let lambda = constant(Complex64::from_polar(1.0, 0.8));
    let (rot, _, _) = metrical_deform(&cylinder_md(), &lambda).unwrap();
    assert!(rot.omega.max_abs() < 1e-15);
    assert!((rot.mean.values()[0].re - 0.5).abs() < 1e-15);
    assert!((rot.hopf.values()[0] - Complex64::from_polar(-0.25, 0.8)).norm() < 1e-15);
    let mut zero = vec![Complex64::new(1.0, 0.0); chart().len()];
    zero[5] = Complex64::new(0.0, 0.0);
    let lambda = ScalarField::from_values(chart(), crate::numgrid::FieldKind::Complex, zero).unwrap();
    assert!(matches!(metrical_deform(&cylinder_md(), &lambda), Err(Error::Domain(_))));
}

#[test]
fn holomorphic_lambda_keeps_moebius_metric() {
    let e = catalog::by_name("enneper").unwrap();
    let md = SurfaceInvariants::compute(&e.patch(32).unwrap()).unwrap().metrical_data();
    let lambda = ScalarField::from_fn(*md.chart(), |z| 1.0 + 0.3 * z * z);
    let (out, rep, _) = metrical_deform(&md, &lambda).unwrap();
    let a = md.mobius_factor();
    let b = out.mobius_factor();
    assert!(a.max_abs_diff(&b, None).unwrap() < 1e-12 * a.scale());
    assert!(rep.log_modulus_laplacian < 1e-3);
}

#[test]
fn bonnet_rotation() {
    let (out, [g, c], stamp) = bonnet_family_check(&cylinder_md(), std::f64::consts::FRAC_PI_2, &tols()).unwrap();
    assert!((out.hopf.values()[0] - Complex64::new(0.0, -0.25)).norm() < 1e-15);
    assert!(g.max_abs < 1e-15 && c.max_abs < 1e-15);
    assert_eq!(stamp.family, Family::Bonnet);
}

#[test]
fn bonnet_rotation_off_cmc_breaks_codazzi() {
    let (md, _) = logspiral();
    let [_, before] = residuals::gauss_codazzi(&md, &tols());
    let (_, [g, after], _) = bonnet_family_check(&md, std::f64::consts::FRAC_PI_2, &tols()).unwrap();
    assert!(before.pass);
    assert!(!after.pass, "{}", after.max_abs);
    let [g0, _] = residuals::gauss_codazzi(&md, &tols());
    assert!((g.max_abs - g0.max_abs).abs() < 1e-10);
}

fn logspiral() -> (MetricalData, ScalarField) {
    let e = catalog::by_name("logspiral-cylinder").unwrap();
    let chart = e.chart(64).unwrap();
    let [omega, mean, _, hopf, _] = e.closed_form_fields(&chart).unwrap();
    (MetricalData::new(omega, mean, hopf).unwrap(), e.himc_potential(&chart).unwrap())
}

#[test]
fn himc_family_identity_and_invariance() {
    let (md, h) = logspiral();
    let (id, _) = himc_family(&md.omega, &h, &md.hopf, 0.0, &tols()).unwrap();
    assert!(id.mean.max_abs_diff(&md.mean, None).unwrap() < 1e-15);
    for t in [0.1, 0.5, 1.0] {
        let (out, _) = himc_family(&md.omega, &h, &md.hopf, t, &tols()).unwrap();
        let a = md.mobius_factor();
        assert!(a.max_abs_diff(&out.mobius_factor(), None).unwrap() < 1e-10 * a.scale());
        // kappa_t = kappa conj(w)/w
        let k = md.kappa();
        let kt = out.kappa();
        for i in 0..k.values().len() {
            let w = 1.0 + 2.0 * Complex64::i() * h.values()[i] * t;
            assert!((kt.values()[i] - k.values()[i] * w.conj() / w).norm() < 1e-14);
        }
        for r in residuals::gauss_codazzi(&out, &tols()) {
            assert!(r.pass, "t={t}: {} {}", r.name, r.max_abs);
        }
    }
}

#[test]
fn himc_family_pole() {
    // h = i/2 and t = 1 give w = 0.
    let h = constant(Complex64::new(0.0, 0.5));
    let r = himc_family(&real(0.0), &h, &real(-0.25), 1.0, &tols());
    assert!(matches!(r, Err(Error::PoleOfFamily { .. })));
}

#[test]
fn harmonic_conjugate_recovers_potential() {
    let (md, h) = logspiral();
    let got = himc_potential_from_mean(&md.mean).unwrap();
    // equal up to an imaginary constant, fixed at node 0
    let shift = h.values()[0] - got.values()[0];
    for k in 0..h.values().len() {
        assert!((got.values()[k] + shift - h.values()[k]).norm() < 1e-8);
    }
}

#[test]
fn checksums_are_stable() {
    let a = checksum(&[&real(1.0)]);
    assert_eq!(a, checksum(&[&real(1.0)]));
    assert_ne!(a, checksum(&[&real(1.0 + 1e-15)]));
}
