//! The acceptance suite: nine numbered criteria, each run independently and
//! reported as one line.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog;
use crate::deform;
use crate::error::{Error, Result};
use crate::hazzidakis::{self, BonnetType};
use crate::invariants::{unit_sphere_inversion, ConformalData, MetricalData, SurfaceInvariants};
use crate::lightcone;
use crate::numgrid::{ScalarField, BOUNDARY_COLLAR};
use crate::residuals;
use crate::simcurve::{self, CurveStart, SimCurvatureState};
use crate::tolerances::Tolerances;

pub const CRITERIA: usize = 9;

/// Surfaces with analytic jets used by the integrability checks.
pub const INTEGRABLE_ENTRIES: [&str; 4] = ["cylinder", "sphere", "enneper", "logspiral-cylinder"];

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: &'static str,
    pub pass: bool,
    pub seconds: f64,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {} [{}] {}: {} ({:.2} s)",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.title,
            self.detail,
            self.seconds
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SelftestConfig {
    pub tols: Tolerances,
    pub seed: u64,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self {
            tols: Tolerances::default(),
            seed: 7,
        }
    }
}

pub fn title(id: usize) -> &'static str {
    match id {
        1 => "integrability residuals",
        2 => "ladder consistency",
        3 => "central sphere cross-check",
        4 => "Moebius invariance",
        5 => "deformation preservation",
        6 => "Hazzidakis flatness",
        7 => "similarity curves",
        8 => "Burgers flow",
        9 => "negative controls",
        _ => "unknown",
    }
}

/// Runs one criterion; an error counts as a failure with its message.
pub fn run(id: usize, cfg: &SelftestConfig) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => integrability(cfg),
        2 => ladder(),
        3 => congruence(),
        4 => inversion(),
        5 => deformations(cfg),
        6 => hazzidakis_checks(cfg),
        7 => curves(),
        8 => burgers(),
        9 => negative_controls(cfg),
        _ => Err(Error::Domain(format!("no criterion {id}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (pass, detail) = match outcome {
        Ok(c) => {
            let within = c.budget.map_or(true, |b| seconds <= b);
            let mut detail = c.detail;
            if let Some(b) = c.budget {
                detail.push_str(&format!("; budget {b} s"));
            }
            (c.pass && within, detail)
        }
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id,
        title: title(id),
        pass,
        seconds,
        detail,
    }
}

pub fn run_all(cfg: &SelftestConfig) -> Vec<CriterionResult> {
    (1..=CRITERIA).map(|id| run(id, cfg)).collect()
}

struct Check {
    pass: bool,
    detail: String,
    budget: Option<f64>,
}

/// Accumulates named sub-checks.
#[derive(Default)]
struct Tally {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: String) {
        if !ok {
            self.failures.push(what);
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }

    fn finish(self, budget: Option<f64>) -> Check {
        let pass = self.failures.is_empty();
        let detail = if pass {
            self.notes.join("; ")
        } else {
            format!("failed: {}", self.failures.join("; "))
        };
        Check { pass, detail, budget }
    }
}

fn relative(report: &residuals::ResidualReport) -> f64 {
    report.max_abs / report.scale
}

fn integrability(cfg: &SelftestConfig) -> Result<Check> {
    let mut t = Tally::default();
    let mut worst: f64 = 0.0;
    for name in INTEGRABLE_ENTRIES {
        let entry = catalog::by_name(name)?;
        let mut reports = Vec::new();
        for n in [64, 128] {
            let inv = SurfaceInvariants::compute(&entry.patch(n)?)?;
            let mut r = residuals::gauss_codazzi(&inv.metrical_data(), &cfg.tols).to_vec();
            r.extend(residuals::conformal_gauss_codazzi(&inv.conformal_data(), &cfg.tols));
            reports.push(r);
        }
        for (coarse, fine) in reports[0].iter().zip(&reports[1]) {
            worst = worst.max(relative(fine));
            t.check(
                fine.max_abs <= 1e-2 * fine.scale,
                format!("{name} {} = {:.2e} at 128", fine.name, relative(fine)),
            );
            t.check(
                residuals::decreased_by(coarse, fine, 3.0),
                format!("{name} {} did not decrease 3x ({:.2e} -> {:.2e})", fine.name, coarse.max_abs, fine.max_abs),
            );
        }
    }
    t.note(format!("max relative residual {worst:.2e} at 128"));
    Ok(t.finish(Some(10.0)))
}

fn ladder() -> Result<Check> {
    let mut t = Tally::default();
    let (mut worst_ladder, mut worst_hill): (f64, f64) = (0.0, 0.0);
    for name in catalog::NAMES {
        let entry = catalog::by_name(name)?;
        // Graph charts are not conformal, so the identity does not apply.
        if entry.approximate {
            continue;
        }
        let inv = SurfaceInvariants::compute(&entry.patch(128)?)?;
        let metrical = inv.mobius_factor_metrical();
        let scale = inv.mobius_factor.scale();
        let d = inv.mobius_factor.max_abs_diff(&metrical, None)? / scale;
        worst_ladder = worst_ladder.max(d);
        t.check(d <= 1e-10, format!("{name}: 4|kappa|^2 vs h^2 e^omega differ by {d:.2e}"));
        if !entry.has_analytic_jets() {
            continue;
        }
        let psi = lightcone::normalized_lift(&entry.patch(128)?)?;
        let hill = lightcone::hill_decomposition(&psi)?;
        for k in inv.valid_interior() {
            let target = inv.kappa.values()[k].norm();
            let got = hill.kappa_norm.values()[k].re;
            let rel = (got - target).abs() / target.max(f64::MIN_POSITIVE);
            worst_hill = worst_hill.max(rel);
        }
    }
    t.check(worst_hill <= 1e-3, format!("Hill |kappa| relative error {worst_hill:.2e}"));
    t.note(format!("ladder {worst_ladder:.2e}, Hill {worst_hill:.2e}"));
    Ok(t.finish(None))
}

fn congruence() -> Result<Check> {
    let mut t = Tally::default();
    for name in ["cylinder", "enneper"] {
        let entry = catalog::by_name(name)?;
        let coarse = lightcone::congruence_check(&entry.patch(64)?)?;
        let fine = lightcone::congruence_check(&entry.patch(128)?)?;
        t.check(
            fine.max_relative <= 1e-2,
            format!("{name}: <dS,dS> off by {:.2e}", fine.max_relative),
        );
        t.check(
            fine.max_relative < coarse.max_relative,
            format!("{name}: no improvement ({:.2e} -> {:.2e})", coarse.max_relative, fine.max_relative),
        );
        t.note(format!("{name} {:.2e} -> {:.2e}", coarse.max_relative, fine.max_relative));
    }
    Ok(t.finish(None))
}

fn inversion() -> Result<Check> {
    let mut t = Tally::default();
    let entry = catalog::by_name("cylinder")?;
    let patch = entry.patch(128)?;
    let before = SurfaceInvariants::compute(&patch)?;
    let after = SurfaceInvariants::compute(&patch.map_points(unit_sphere_inversion)?)?;
    let nodes = patch.chart().interior_indices(BOUNDARY_COLLAR);
    let d = before.mobius_factor.max_abs_diff(&after.mobius_factor, Some(&nodes))?
        / before.mobius_factor.scale();
    t.check(d <= 1e-2, format!("Moebius factor moved by {d:.2e} under inversion"));
    t.note(format!("relative change {d:.2e}"));
    Ok(t.finish(None))
}

fn catalog_conformal(name: &str, n: usize) -> Result<ConformalData> {
    let entry = catalog::by_name(name)?;
    entry
        .conformal_data(&entry.chart(n)?)
        .ok_or_else(|| Error::Domain(format!("{name} has no closed-form conformal data")))
}

fn catalog_metrical(name: &str, n: usize) -> Result<(MetricalData, ScalarField)> {
    let entry = catalog::by_name(name)?;
    let chart = entry.chart(n)?;
    let [omega, mean, _, hopf, _] = entry
        .closed_form_fields(&chart)
        .ok_or_else(|| Error::Domain(format!("{name} has no closed forms")))?;
    let h = entry
        .himc_potential(&chart)
        .ok_or_else(|| Error::Domain(format!("{name} has no HIMC potential")))?;
    Ok((MetricalData::new(omega, mean, hopf)?, h))
}

fn max_pointwise(a: &ScalarField, b: &ScalarField) -> Result<f64> {
    Ok(a.max_abs_diff(b, None)? / a.scale())
}

fn deformations(cfg: &SelftestConfig) -> Result<Check> {
    let tols = &cfg.tols;
    let mut t = Tally::default();

    // (a) T-transform
    for name in ["cylinder", "enneper", "logspiral-cylinder"] {
        let cd = catalog_conformal(name, 128)?;
        let base = residuals::isothermic_form_residual(&cd, tols);
        for r in [-1.0, 0.5, 2.0] {
            let (out, _) = deform::t_transform(&cd, r, tols)?;
            t.check(out.kappa.values() == cd.kappa.values(), format!("(a) {name} r={r}: kappa changed"));
            let rep = residuals::isothermic_form_residual(&out, tols);
            t.check(
                (rep.max_abs - base.max_abs).abs() <= 1e-12 && rep.pass,
                format!("(a) {name} r={r}: isothermic residual {:.2e} vs {:.2e}", rep.max_abs, base.max_abs),
            );
        }
    }

    // (b) Willmore associated family on Enneper
    let cd = catalog_conformal("enneper", 128)?;
    let cd = cd.clone().with_q(ScalarField::zeros(*cd.chart()))?;
    let base = residuals::conformal_gauss_codazzi(&cd, tols);
    for lambda in [Complex64::i(), Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3), Complex64::new(-1.0, 0.0)] {
        let (out, _) = deform::constrained_willmore_family(&cd, lambda, tols)?;
        t.check(
            out.schwarzian.values() == cd.schwarzian.values(),
            format!("(b) lambda={lambda}: c changed"),
        );
        let rep = residuals::conformal_gauss_codazzi(&out, tols);
        for (a, b) in base.iter().zip(&rep) {
            t.check(
                (a.max_abs - b.max_abs).abs() <= 1e-12 && b.max_abs <= 1e-12,
                format!("(b) lambda={lambda}: {} {:.2e} vs {:.2e}", a.name, b.max_abs, a.max_abs),
            );
        }
    }

    // (c) HIMC family on the log-spiral cylinder
    let (md, h) = catalog_metrical("logspiral-cylinder", 128)?;
    let m0 = md.mobius_factor();
    let k0 = md.kappa();
    let mut kappa_moves = f64::INFINITY;
    for tv in [0.1, 0.5, 1.0] {
        let (out, _) = deform::himc_family(&md.omega, &h, &md.hopf, tv, tols)?;
        let d = max_pointwise(&m0, &out.mobius_factor())?;
        t.check(d <= 1e-10, format!("(c) t={tv}: Moebius factor moved {d:.2e}"));
        let dk = out.kappa().max_abs_diff(&k0, None)?;
        kappa_moves = kappa_moves.min(dk);
        t.check(dk > 1e-2, format!("(c) t={tv}: kappa moved only {dk:.2e}"));
    }
    t.note(format!("(c) min max|kappa_t - kappa| = {kappa_moves:.3}"));

    // (d) ratio preservation under lambda = 1/(1 + 0.1 z)^2
    let mut worst_ratio: f64 = 0.0;
    for name in catalog::NAMES {
        let entry = catalog::by_name(name)?;
        let inv = SurfaceInvariants::compute(&entry.patch(64)?)?;
        let md = inv.metrical_data();
        let lambda = ScalarField::from_fn(*md.chart(), |z| 1.0 / ((1.0 + 0.1 * z) * (1.0 + 0.1 * z)));
        let (out, _, _) = deform::metrical_deform(&md, &lambda)?;
        let a = md.similarity_ratio();
        let b = out.similarity_ratio();
        for k in 0..a.mask.len() {
            if a.mask[k] || b.mask[k] {
                continue;
            }
            let (x, y) = (a.field.values()[k].re, b.field.values()[k].re);
            worst_ratio = worst_ratio.max((x - y).abs() / x.abs().max(1.0));
        }
    }
    t.check(worst_ratio <= 1e-10, format!("(d) K/H^2 moved {worst_ratio:.2e}"));
    t.note(format!("(d) K/H^2 deviation {worst_ratio:.2e}"));
    Ok(t.finish(None))
}

fn hazzidakis_checks(cfg: &SelftestConfig) -> Result<Check> {
    let mut t = Tally::default();
    // exact flat solution
    let mut worst_res: f64 = 0.0;
    for km in [-1.0, -2.0, -0.5] {
        for k in 0..100 {
            let s = 0.2 + 2.8 * k as f64 / 99.0;
            let [h, hs, hss, hsss] = hazzidakis::flat_bonnet_solution(km, s)?;
            worst_res = worst_res.max(hazzidakis::equation_residual(s, h, hs, hss, hsss, BonnetType::C).abs());
        }
    }
    t.check(worst_res <= 1e-12, format!("flat residual {worst_res:.2e}"));

    // RK4 against the closed form, then flatness along the solution
    for km in [-1.0, -2.0] {
        let [h0, hs0, hss0, _] = hazzidakis::flat_bonnet_solution(km, 1.0)?;
        let sol = hazzidakis::integrate(BonnetType::C, 1.0, [h0, hs0, hss0], 3.0, 1e-3)?;
        t.check(
            sol.stop == hazzidakis::StopReason::Completed && (sol.s.last().copied().unwrap_or(0.0) - 3.0).abs() < 1e-9,
            format!("K_M={km}: integration stopped at {:?}", sol.stop),
        );
        let err = sol
            .s
            .iter()
            .zip(&sol.h)
            .map(|(s, h)| (h - (-2.0 / (km * s))).abs() / h.abs())
            .fold(0.0, f64::max);
        t.check(err <= 1e-8, format!("K_M={km}: RK4 error {err:.2e}"));
        let kdev = sol.kmobius.iter().map(|k| (k - km).abs()).fold(0.0, f64::max);
        t.check(kdev <= 1e-6, format!("K_M={km}: Moebius curvature deviates {kdev:.2e}"));
        let e0 = hazzidakis::flat_conformal_factor(km, 1.0);
        let ratio = hazzidakis::ratio_diagnostic(&sol, e0);
        let rdev = ratio.iter().map(|r| r.map_or(f64::INFINITY, f64::abs)).fold(0.0, f64::max);
        t.check(rdev <= 1e-6, format!("K_M={km}: K/H^2 reaches {rdev:.2e}"));
        t.note(format!("K_M={km}: RK4 {err:.1e}, K_M dev {kdev:.1e}, K/H^2 {rdev:.1e}"));
    }

    // random negative controls
    for (kind, seed) in [(BonnetType::A, cfg.seed), (BonnetType::B, cfg.seed.wrapping_add(1))] {
        let controls = hazzidakis::random_controls(kind, 50, seed, 1.0, 1e-3, 1e-4);
        let flats = controls.iter().filter(|c| c.verdict.flat).count();
        t.check(flats == 0, format!("type {kind:?}: {flats} flat verdicts among 50"));
    }
    Ok(t.finish(Some(5.0)))
}

fn curves() -> Result<Check> {
    let mut t = Tally::default();
    let circle = catalog::make_circle(1.0, 512)?;
    let ks = simcurve::similarity_curvature(&circle)?;
    let circ = circle.nested_interior().map(|k| ks[k].abs()).fold(0.0, f64::max);
    t.check(circ <= 1e-6, format!("circle kappa_S reaches {circ:.2e}"));

    let target = 0.3;
    let n = 512;
    let ds = 4.0 / (n - 1) as f64;
    let u = vec![target; n];
    let curve = simcurve::reconstruct_curve(&u, ds, false, CurveStart::default())?;
    let measured = simcurve::similarity_curvature(&curve)?;
    let gap = curve.nested_interior().map(|k| (measured[k] - target).abs()).fold(0.0, f64::max);
    t.check(gap <= 1e-4, format!("reconstructed log-spiral kappa_S off by {gap:.2e}"));
    let frame = simcurve::sim_frame(&curve, &u)?;
    let fr = simcurve::frenet_residual(&frame, &u)?;
    t.check(fr <= 1e-4, format!("Frenet residual {fr:.2e}"));
    t.note(format!("circle {circ:.1e}, spiral {gap:.1e}, Frenet {fr:.1e}"));
    Ok(t.finish(None))
}

fn burgers() -> Result<Check> {
    let mut t = Tally::default();
    let period = 2.0 * std::f64::consts::PI;
    let u0 = SimCurvatureState::from_fn(512, period, |s| simcurve::cole_hopf(s, 0.0, 1.0, 2.0))?;
    let end = simcurve::burgers_evolve_to(&u0, 0.5)?;
    let err = end
        .grid()
        .iter()
        .zip(&end.u)
        .map(|(s, u)| (u - simcurve::cole_hopf(*s, 0.5, 1.0, 2.0)).abs())
        .fold(0.0, f64::max);
    t.check(err <= 1e-5, format!("Cole-Hopf mismatch {err:.2e}"));
    let drift = (end.mean() - u0.mean()).abs();
    t.check(drift <= 1e-8, format!("mean drift {drift:.2e}"));
    let c = SimCurvatureState::new(vec![0.7; 512], period)?;
    let c_end = simcurve::burgers_evolve_to(&c, 0.5)?;
    let cdev = c_end.u.iter().map(|v| (v - 0.7).abs()).fold(0.0, f64::max);
    t.check(cdev <= 1e-12, format!("constant state moved {cdev:.2e}"));
    t.note(format!("oracle {err:.1e}, mean {drift:.1e}, constant {cdev:.1e}"));
    Ok(t.finish(Some(5.0)))
}

fn negative_controls(cfg: &SelftestConfig) -> Result<Check> {
    let tols = &cfg.tols;
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let inv = SurfaceInvariants::compute(&catalog::by_name("cylinder")?.patch(128)?)?;
    let cd = inv.conformal_data();
    let mut noise = |f: &ScalarField| {
        let v = f
            .values()
            .iter()
            .map(|v| v + Complex64::new(rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05)))
            .collect();
        ScalarField::from_values(*f.chart(), crate::numgrid::FieldKind::Complex, v)
    };
    let perturbed = ConformalData::new(noise(&cd.kappa)?, noise(&cd.schwarzian)?, None)?;
    let reps = residuals::conformal_gauss_codazzi(&perturbed, tols);
    let worst = reps
        .iter()
        .map(|r| r.max_abs / (r.tolerance * r.scale))
        .fold(f64::INFINITY, f64::min);
    t.check(worst >= 10.0, format!("perturbed data only {worst:.1}x over tolerance"));

    let exact = catalog_conformal("cylinder", 128)?;
    let w = residuals::willmore_field_values(&exact);
    let dev = w
        .values()
        .iter()
        .map(|v| (v.norm() - 1.0 / 32.0).abs())
        .fold(0.0, f64::max);
    t.check(dev <= 1e-10, format!("cylinder Willmore residual deviates from 1/32 by {dev:.2e}"));
    t.check(!residuals::willmore_residual(&exact, tols).pass, "cylinder passed the Willmore test".into());
    t.note(format!("perturbed {worst:.0}x tolerance, Willmore |w| - 1/32 = {dev:.1e}"));
    Ok(t.finish(None))
}
