use std::io::Write;
use std::sync::Arc;

use mlab_core::catalog::{self, CatalogEntry, ChartDomain, NAMES};
use mlab_core::deform::{self, DeformationStamp};
use mlab_core::hazzidakis::{self, BonnetType};
use mlab_core::invariants::{ConformalData, DerivativeSource, MetricalData, SurfaceInvariants, SurfacePatch};
use mlab_core::lightcone;
use mlab_core::numgrid::{ScalarField, BOUNDARY_COLLAR};
use mlab_core::residuals::{self, ResidualReport};
use mlab_core::selftest::{self, SelftestConfig, CRITERIA};
use mlab_core::simcurve::{self, CurveStart, ParamKind, PlaneCurveSamples, SimCurvatureState};
use mlab_core::{Error, Tolerances};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::expr::{self, RealExpr};
use crate::output::{read_columns, some, Run};
use crate::{CliError, CliResult, EXIT_SELFTEST};

pub fn run(cli: Cli) -> CliResult<u8> {
    let tols = Tolerances::new(cli.tol_profile);
    let out = cli.out.as_deref();
    let ctx = Ctx { tols, seed: cli.seed };
    match cli.command {
        Command::Catalog { action } => match action {
            CatalogCmd::List => catalog_list(Run::new("catalog list", out)?),
            CatalogCmd::Emit(s) => catalog_emit(Run::new("catalog emit", out)?, &s),
        },
        Command::Invariants(s) => invariants(Run::new("invariants", out)?, &s),
        Command::Residuals(a) => residuals_cmd(Run::new("residuals", out)?, &a, &ctx),
        Command::Deform(a) => deform_cmd(Run::new("deform", out)?, &a, &ctx),
        Command::Hazzidakis(a) => hazzidakis_cmd(Run::new("hazzidakis", out)?, &a),
        Command::Curve { action } => match action {
            CurveCmd::Measure(a) => curve_measure(Run::new("curve measure", out)?, &a),
            CurveCmd::Evolve(a) => curve_evolve(Run::new("curve evolve", out)?, &a),
            CurveCmd::Reconstruct(a) => curve_reconstruct(Run::new("curve reconstruct", out)?, &a),
        },
        Command::Lightcone(s) => lightcone_cmd(Run::new("lightcone", out)?, &s),
        Command::Selftest { criterion } => return selftest_cmd(Run::new("selftest", out)?, criterion, &ctx),
    }?;
    Ok(0)
}

struct Ctx {
    tols: Tolerances,
    seed: u64,
}

fn entry_json(e: &CatalogEntry) -> Value {
    json!({
        "name": e.name,
        "params": e.params,
        "domain": e.domain,
        "flags": e.flags,
        "approximate": e.approximate,
        "analytic_jets": e.has_analytic_jets(),
    })
}

fn resolve(run: &mut Run, s: &SurfaceArgs) -> CliResult<CatalogEntry> {
    run.param("n", s.n);
    match (&s.surface, &s.graph) {
        (Some(name), None) => {
            run.param("surface", name);
            Ok(catalog::by_name(name)?)
        }
        (None, Some(src)) => {
            let d = s.domain.clone().unwrap_or_else(|| vec![-1.0, 1.0, -1.0, 1.0]);
            run.param("graph", src).param("domain", &d);
            let f = Arc::new(RealExpr::parse(src, &["x", "y"])?);
            let height = move |x: f64, y: f64| f.eval(&[x, y]).unwrap_or(f64::NAN);
            Ok(catalog::make_graph_surface(src, height, ChartDomain::open((d[0], d[1]), (d[2], d[3]))))
        }
        _ => Err(CliError::Usage("give one of --surface <name> or --graph <expr>".into())),
    }
}

fn catalog_list(run: Run) -> CliResult<()> {
    let entries: Vec<Value> = NAMES
        .iter()
        .map(|n| catalog::by_name(n).map(|e| entry_json(&e)))
        .collect::<Result<_, Error>>()?;
    run.finish(entries)
}

fn catalog_emit(mut run: Run, s: &SurfaceArgs) -> CliResult<()> {
    let e = resolve(&mut run, s)?;
    let patch = e.patch(s.n)?;
    run.with_writer("patch.csv", |w| write_patch(w, &patch))?;
    let meta = json!({ "entry": entry_json(&e), "chart": patch.chart() });
    run.json("entry.json", &meta)?;
    run.finish(meta)
}

fn write_patch(w: impl Write, p: &SurfacePatch) -> CliResult<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["i", "j", "x", "y", "X", "Y", "Z"])?;
    for (k, v) in p.positions().iter().enumerate() {
        let (i, j) = p.chart().node(k);
        let (x, y) = p.chart().point(k);
        let mut rec = vec![i.to_string(), j.to_string()];
        rec.extend([x, y, v[0], v[1], v[2]].iter().map(|c| format!("{c:.17e}")));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

fn invariants(mut run: Run, s: &SurfaceArgs) -> CliResult<()> {
    let e = resolve(&mut run, s)?;
    let patch = e.patch(s.n)?;
    let inv = SurfaceInvariants::compute(&patch)?;
    run.field("omega.csv", &inv.omega)?;
    run.field("H.csv", &inv.mean)?;
    run.field("kappa.csv", &inv.kappa)?;
    let umbilic = inv.umbilic.iter().filter(|&&u| u).count() as f64 / inv.umbilic.len() as f64;
    let report = json!({
        "surface": e.name,
        "chart": inv.chart,
        "derivatives": match patch.source() {
            DerivativeSource::Analytic => "analytic",
            DerivativeSource::FiniteDifference => "finite_difference",
        },
        "scalars": {
            "mobius_area": inv.mobius_area(),
            "conformality_residual": inv.conformality_residual,
            "umbilic_fraction": umbilic,
        },
    });
    run.json("report.json", &report)?;
    run.finish(report)
}

/// Conformal data: the catalog's exact fields when it has them.
fn conformal_data(e: &CatalogEntry, inv: &SurfaceInvariants) -> ConformalData {
    e.conformal_data(&inv.chart).unwrap_or_else(|| inv.conformal_data())
}

fn residuals_cmd(mut run: Run, a: &ResidualArgs, ctx: &Ctx) -> CliResult<()> {
    let e = resolve(&mut run, &a.surface)?;
    let inv = SurfaceInvariants::compute(&e.patch(a.surface.n)?)?;
    let md = inv.metrical_data();
    let cd = conformal_data(&e, &inv);
    let q = match &a.q {
        Some(q) => expr::complex(q)?,
        None => residuals::fit_constant_q(&cd),
    };
    run.param("q", [q.re, q.im]);
    let tols = &ctx.tols;
    let mut reports: Vec<ResidualReport> = residuals::gauss_codazzi(&md, tols).into();
    reports.extend(residuals::conformal_gauss_codazzi(&cd, tols));
    reports.push(residuals::isothermic_form_residual(&cd, tols));
    reports.push(residuals::willmore_residual(&cd, tols));
    let cq = cd.clone().with_q(ScalarField::constant(inv.chart, q))?;
    reports.push(residuals::constrained_willmore_residual(&cq, tols));
    reports.push(residuals::himc_residual(&inv.mean, tols));
    reports.push(residuals::fit_special_isothermic(&md, tols).report);
    run.json("residuals.json", &reports)?;
    run.finish(reports)
}

#[derive(Serialize)]
struct Preservation {
    family: &'static str,
    stamp: DeformationStamp,
    /// Max deviation of each invariant the family should keep.
    preserved: Value,
    /// Max change of quantities the family moves.
    changed: Value,
    residuals_before: Vec<ResidualReport>,
    residuals_after: Vec<ResidualReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<deform::LambdaReport>,
}

fn abs_dev(a: &ScalarField, b: &ScalarField) -> CliResult<f64> {
    Ok(a.map_real(|v| v.norm()).max_abs_diff(&b.map_real(|v| v.norm()), None)?)
}

fn ratio_dev(a: &MetricalData, b: &MetricalData) -> f64 {
    let (ra, rb) = (a.similarity_ratio(), b.similarity_ratio());
    (0..ra.mask.len())
        .filter(|&k| !ra.mask[k] && !rb.mask[k])
        .map(|k| (ra.field.values()[k] - rb.field.values()[k]).norm())
        .fold(0.0, f64::max)
}

fn conformal_reports(cd: &ConformalData, tols: &Tolerances) -> Vec<ResidualReport> {
    let mut r: Vec<ResidualReport> = residuals::conformal_gauss_codazzi(cd, tols).into();
    r.push(residuals::isothermic_form_residual(cd, tols));
    r.push(residuals::constrained_willmore_residual(cd, tols));
    r
}

fn write_conformal(run: &mut Run, cd: &ConformalData) -> CliResult<()> {
    run.field("kappa.csv", &cd.kappa)?;
    run.field("c.csv", &cd.schwarzian)?;
    if let Some(q) = &cd.q {
        run.field("q.csv", q)?;
    }
    Ok(())
}

fn write_metrical(run: &mut Run, md: &MetricalData) -> CliResult<()> {
    run.field("omega.csv", &md.omega)?;
    run.field("H.csv", &md.mean)?;
    run.field("Q.csv", &md.hopf)
}

fn metrical_preservation(md: &MetricalData, out: &MetricalData) -> CliResult<Value> {
    Ok(json!({
        "mobius_factor": md.mobius_factor().max_abs_diff(&out.mobius_factor(), None)?,
        "principal_curvature_ratio": ratio_dev(md, out),
    }))
}

/// Unit parameter: an angle or a complex literal.
fn unit_param(s: &str) -> CliResult<Complex64> {
    match s.trim().parse::<f64>() {
        Ok(theta) => Ok(Complex64::from_polar(1.0, theta)),
        Err(_) => expr::complex(s),
    }
}

fn deform_cmd(mut run: Run, a: &DeformArgs, ctx: &Ctx) -> CliResult<()> {
    let e = resolve(&mut run, &a.surface)?;
    run.param("family", format!("{:?}", a.family).to_lowercase()).param("param", &a.param);
    let inv = SurfaceInvariants::compute(&e.patch(a.surface.n)?)?;
    let tols = &ctx.tols;
    let report = match a.family {
        FamilyArg::T | FamilyArg::Cw => {
            let mut cd = conformal_data(&e, &inv);
            if let Some(q) = &a.q {
                cd = cd.with_q(ScalarField::constant(inv.chart, expr::complex(q)?))?;
            }
            let (out, stamp, name) = if a.family == FamilyArg::T {
                let (o, s) = deform::t_transform(&cd, expr::real(&a.param)?, tols)?;
                (o, s, "t_transform")
            } else {
                let (o, s) = deform::constrained_willmore_family(&cd, unit_param(&a.param)?, tols)?;
                (o, s, "constrained_willmore")
            };
            write_conformal(&mut run, &out)?;
            let preserved = if a.family == FamilyArg::T {
                json!({ "kappa": out.kappa.max_abs_diff(&cd.kappa, None)? })
            } else {
                json!({ "abs_kappa": abs_dev(&out.kappa, &cd.kappa)? })
            };
            Preservation {
                family: name,
                stamp,
                preserved,
                changed: json!({
                    "c": out.schwarzian.max_abs_diff(&cd.schwarzian, None)?,
                    "kappa": out.kappa.max_abs_diff(&cd.kappa, None)?,
                }),
                residuals_before: conformal_reports(&cd, tols),
                residuals_after: conformal_reports(&out, tols),
                lambda: None,
            }
        }
        FamilyArg::Lambda | FamilyArg::Bonnet => {
            let md = inv.metrical_data();
            let before: Vec<ResidualReport> = residuals::gauss_codazzi(&md, tols).into();
            let (out, stamp, lambda, name) = if a.family == FamilyArg::Lambda {
                let c = expr::polynomial(&a.param)?;
                let field = ScalarField::from_fn(inv.chart, |z| expr::eval_polynomial(&c, z));
                let (o, l, s) = deform::metrical_deform(&md, &field)?;
                (o, s, Some(l), "metrical_lambda")
            } else {
                let (o, _, s) = deform::bonnet_family_check(&md, expr::real(&a.param)?, tols)?;
                (o, s, None, "bonnet")
            };
            write_metrical(&mut run, &out)?;
            Preservation {
                family: name,
                stamp,
                preserved: metrical_preservation(&md, &out)?,
                changed: json!({
                    "omega": out.omega.max_abs_diff(&md.omega, None)?,
                    "H": out.mean.max_abs_diff(&md.mean, None)?,
                    "Q": out.hopf.max_abs_diff(&md.hopf, None)?,
                }),
                residuals_before: before,
                residuals_after: residuals::gauss_codazzi(&out, tols).into(),
                lambda,
            }
        }
        FamilyArg::Himc => {
            let t = expr::real(&a.param)?;
            let (omega, hopf) = match e.closed_form_fields(&inv.chart) {
                Some([omega, _, _, hopf, _]) => (omega, hopf),
                None => (inv.omega.clone(), inv.hopf.clone()),
            };
            let h = match e.himc_potential(&inv.chart) {
                Some(h) => h,
                None => deform::himc_potential_from_mean(&inv.mean)?,
            };
            let mean = h.map_real(|h| 1.0 / (2.0 * h.re));
            let md = MetricalData::new(omega.clone(), mean, hopf.clone())?;
            let (out, stamp) = deform::himc_family(&omega, &h, &hopf, t, tols)?;
            write_metrical(&mut run, &out)?;
            let mut preserved = metrical_preservation(&md, &out)?;
            preserved["abs_kappa"] = json!(abs_dev(&out.kappa(), &md.kappa())?);
            Preservation {
                family: "himc",
                stamp,
                preserved,
                changed: json!({
                    "H": out.mean.max_abs_diff(&md.mean, None)?,
                    "Q": out.hopf.max_abs_diff(&md.hopf, None)?,
                }),
                residuals_before: residuals::gauss_codazzi(&md, tols).into(),
                residuals_after: residuals::gauss_codazzi(&out, tols).into(),
                lambda: None,
            }
        }
    };
    run.json("preservation.json", &report)?;
    run.finish(report)
}

fn hazzidakis_cmd(mut run: Run, a: &HazzidakisArgs) -> CliResult<()> {
    let kind = BonnetType::parse(&a.kind)?;
    run.param("type", &a.kind)
        .param("s0", a.s0)
        .param("s_end", a.s_end)
        .param("step", a.step)
        .param("flat", a.flat);
    let (initial, e_omega0) = if a.flat {
        let km = a.kmobius.expect("clap requires kmobius with flat");
        run.param("kmobius", km);
        let [h, hs, hss, _] = hazzidakis::flat_bonnet_solution(km, a.s0)?;
        ([h, hs, hss], a.e_omega0.unwrap_or_else(|| hazzidakis::flat_conformal_factor(km, a.s0)))
    } else {
        let need = |v: Option<f64>, flag: &str| {
            v.ok_or_else(|| CliError::Usage(format!("--{flag} is required without --flat")))
        };
        let init = [need(a.h0, "H0")?, need(a.hs0, "Hs0")?, need(a.hss0, "Hss0")?];
        run.param("initial", init);
        (init, a.e_omega0.unwrap_or(1.0))
    };
    run.param("e_omega0", e_omega0);
    let sol = hazzidakis::integrate(kind, a.s0, initial, a.s_end, a.step)?;
    let q = hazzidakis::hopf_modulus_along(&sol);
    let ratio = hazzidakis::ratio_diagnostic(&sol, e_omega0);
    run.columns(
        "hazzidakis.csv",
        &["s", "H", "Hs", "Hss", "KM", "absQ", "ratio"],
        &[some(&sol.s), some(&sol.h), some(&sol.hs), some(&sol.hss), some(&sol.kmobius), q, ratio],
    )?;
    let residual = sol.residuals().iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let result = json!({
        "stop": sol.stop,
        "nodes": sol.len(),
        "s_final": sol.s.last(),
        "H_final": sol.h.last(),
        "max_equation_residual": residual,
        "flat": hazzidakis::flat_verdict(&sol, e_omega0, 1e-4),
    });
    run.finish(result)
}

fn curve_source(run: &mut Run, a: &CurveSource) -> CliResult<PlaneCurveSamples> {
    if let Some(path) = &a.input {
        run.input(path);
        run.param("closed", a.closed);
        let cols = read_columns(path, &["sigma", "x", "y"])?;
        let sigma = &cols[0];
        if sigma.len() < 2 {
            return Err(Error::Domain("need at least two curve samples".into()).into());
        }
        let h = sigma[1] - sigma[0];
        let pts = cols[1].iter().zip(&cols[2]).map(|(&x, &y)| Complex64::new(x, y)).collect();
        return Ok(PlaneCurveSamples::new(ParamKind::EuclideanArclength, h, sigma[0], pts, a.closed)?);
    }
    run.param("n", a.n);
    if let Some(r) = a.circle {
        run.param("circle", r);
        return Ok(catalog::make_circle(r, a.n)?);
    }
    if let Some(c) = &a.logspiral {
        let v: Vec<f64> = c.split(',').map(expr::real).collect::<CliResult<_>>()?;
        if v.len() != 2 {
            return Err(CliError::Usage("--logspiral takes \"c1,c2\"".into()));
        }
        run.param("logspiral", &v).param("sigma_end", a.sigma_end);
        return Ok(catalog::make_logspiral_curve(v[0], v[1], a.sigma_end, a.n)?);
    }
    Err(CliError::Usage("give one of --input, --circle or --logspiral".into()))
}

fn curve_measure(mut run: Run, a: &CurveSource) -> CliResult<()> {
    let c = curve_source(&mut run, a)?;
    let ke = simcurve::euclidean_curvature(&c)?;
    let s = simcurve::angle_parameter(&c)?;
    let ks = simcurve::similarity_curvature(&c)?;
    run.columns(
        "curve_invariants.csv",
        &["sigma", "s", "kappaE", "kappaS"],
        &[some(&c.params()), some(&s), some(&ke), some(&ks)],
    )?;
    let inner: Vec<f64> = c.nested_interior().map(|k| ks[k]).collect();
    let mean = inner.iter().sum::<f64>() / inner.len().max(1) as f64;
    let spread = inner.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    run.finish(json!({
        "samples": c.len(),
        "closed": c.closed,
        "kappaS_mean": mean,
        "kappaS_max_dev": spread,
        "angle_total": s.last(),
    }))
}

fn load_u0(run: &mut Run, a: &EvolveArgs) -> CliResult<SimCurvatureState> {
    let path = std::path::Path::new(&a.u0);
    if path.is_file() {
        run.input(path);
        let cols = read_columns(path, &["s", "u"])?;
        let s = &cols[0];
        if s.len() < 2 {
            return Err(Error::Domain("need at least two curvature samples".into()).into());
        }
        let ds = s[1] - s[0];
        return Ok(SimCurvatureState::new(cols[1].clone(), ds * s.len() as f64)?);
    }
    let period = a.period.unwrap_or(std::f64::consts::TAU);
    run.param("u0", &a.u0).param("n", a.n).param("period", period);
    let f = RealExpr::parse(&a.u0, &["s"])?;
    let ds = period / a.n as f64;
    let u = (0..a.n).map(|k| f.eval(&[k as f64 * ds])).collect::<CliResult<Vec<_>>>()?;
    Ok(SimCurvatureState::new(u, period)?)
}

fn curve_evolve(mut run: Run, a: &EvolveArgs) -> CliResult<()> {
    let u0 = load_u0(&mut run, a)?;
    let ds = u0.ds();
    let dt = a.dt.unwrap_or(simcurve::STABILITY_FACTOR * ds * ds);
    run.param("dt", dt).param("steps", a.steps).param("dump_every", a.dump_every);
    let every = if a.dump_every == 0 { a.steps.max(1) } else { a.dump_every };
    let mut state = u0.clone();
    let mut frames = 0usize;
    let mut done = 0usize;
    let mut dump = |run: &mut Run, st: &SimCurvatureState| -> CliResult<()> {
        let name = format!("frame_{frames:05}.csv");
        frames += 1;
        run.columns(&name, &["s", "u"], &[some(&st.grid()), some(&st.u)])
    };
    dump(&mut run, &state)?;
    while done < a.steps {
        let k = every.min(a.steps - done);
        state = simcurve::burgers_evolve(&state, dt, k)?;
        done += k;
        dump(&mut run, &state)?;
    }
    run.finish(json!({
        "t_final": state.t,
        "mean_initial": u0.mean(),
        "mean_final": state.mean(),
        "frames": frames,
    }))
}

fn curve_reconstruct(mut run: Run, a: &ReconstructArgs) -> CliResult<()> {
    run.input(&a.input);
    run.param("periodic", a.periodic);
    let cols = read_columns(&a.input, &["s", "u"])?;
    let s = &cols[0];
    if s.len() < 2 {
        return Err(Error::Domain("need at least two curvature samples".into()).into());
    }
    let ds = s[1] - s[0];
    let c = simcurve::reconstruct_curve(&cols[1], ds, a.periodic, CurveStart::default())?;
    let grid: Vec<f64> = (0..c.len()).map(|k| s[0] + k as f64 * ds).collect();
    let x: Vec<f64> = c.points.iter().map(|p| p.re).collect();
    let y: Vec<f64> = c.points.iter().map(|p| p.im).collect();
    run.columns("curve.csv", &["s", "x", "y"], &[some(&grid), some(&x), some(&y)])?;
    let gap = (c.points[c.len() - 1] - c.points[0]).norm();
    run.finish(json!({ "samples": c.len(), "closing_gap": gap }))
}

fn lightcone_cmd(mut run: Run, s: &SurfaceArgs) -> CliResult<()> {
    let e = resolve(&mut run, s)?;
    let patch = e.patch(s.n)?;
    let chart = *patch.chart();
    let euclid = lightcone::euclidean_lift(&patch);
    let (cone, future) = euclid.lightcone_check();
    let congruence = lightcone::central_sphere_congruence(&patch)?;
    run.with_writer("congruence.csv", |w| Ok(congruence.write_csv(w)?))?;
    let check = lightcone::congruence_check(&patch)?;
    let hill = match lightcone::normalized_lift(&patch) {
        Ok(psi) => {
            let nodes = chart.interior_indices(BOUNDARY_COLLAR);
            let (zzbar, zz) = psi.normalization_check(&nodes);
            let hill = lightcone::hill_decomposition(&psi)?;
            let lift = lightcone::MinkField {
                chart,
                values: psi.values(),
            };
            run.with_writer("lift.csv", |w| Ok(lift.write_csv(w)?))?;
            run.field("hill_c.csv", &hill.c)?;
            run.field("kappa_norm.csv", &hill.kappa_norm)?;
            let inv = SurfaceInvariants::compute(&patch)?;
            let rel = inv
                .valid_interior()
                .into_iter()
                .map(|k| {
                    let want = inv.kappa.values()[k].norm();
                    (hill.kappa_norm.values()[k].re - want).abs() / want.max(f64::MIN_POSITIVE)
                })
                .fold(0.0, f64::max);
            json!({
                "normalization": { "zzbar": zzbar, "zz": zz },
                "tangential_residual": hill.tangential_residual(&psi),
                "kappa_norm_vs_conformal_hopf": rel,
            })
        }
        Err(err) => json!({ "unavailable": err.to_string() }),
    };
    run.finish(json!({
        "lightcone": { "max_relative": cone, "future_pointing": future },
        "congruence": check,
        "hill": hill,
    }))
}

fn selftest_cmd(run: Run, criterion: Option<usize>, ctx: &Ctx) -> CliResult<u8> {
    let cfg = SelftestConfig {
        tols: ctx.tols,
        seed: ctx.seed,
    };
    let results = match criterion {
        Some(id) if (1..=CRITERIA).contains(&id) => vec![selftest::run(id, &cfg)],
        Some(id) => return Err(CliError::Usage(format!("criteria are numbered 1 to {CRITERIA}, got {id}"))),
        None => selftest::run_all(&cfg),
    };
    for r in &results {
        eprintln!("{}", r.line());
    }
    let all = results.iter().all(|r| r.pass);
    run.finish(&results)?;
    Ok(if all { 0 } else { EXIT_SELFTEST })
}
