//! Deformation families acting on invariant data: the T-transform of
//! isothermic data, the constrained Willmore family, the metrical
//! lambda-deformation with its Bonnet branch, and the associated family of a
//! HIMC surface. Deformed immersions are never reconstructed in space.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::{ConformalData, MetricalData};
use crate::numgrid::{self, ScalarField, BOUNDARY_COLLAR};
use crate::residuals::{self, ResidualReport};
use crate::tolerances::{self as tol, Tolerances};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Allowed `||lambda| - 1|` for unimodular parameters.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    TTransform,
    ConstrainedWillmore,
    MetricalLambda,
    Bonnet,
    Himc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    Real(f64),
    Unit { re: f64, im: f64 },
    /// Checksum of a parameter field.
    Field(u64),
}

/// Provenance of a deformed data set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeformationStamp {
    pub family: Family,
    pub parameter: Parameter,
    pub parent_checksum: u64,
}

/// FNV-1a over the bit patterns of the samples.
pub fn checksum(fields: &[&ScalarField]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for f in fields {
        for v in f.values() {
            for b in v.re.to_bits().to_le_bytes().into_iter().chain(v.im.to_bits().to_le_bytes()) {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
    }
    h
}

fn conformal_checksum(cd: &ConformalData) -> u64 {
    match &cd.q {
        Some(q) => checksum(&[&cd.kappa, &cd.schwarzian, q]),
        None => checksum(&[&cd.kappa, &cd.schwarzian]),
    }
}

fn metrical_checksum(md: &MetricalData) -> u64 {
    checksum(&[&md.omega, &md.mean, &md.hopf])
}

/// `(kappa, c) -> (kappa, c + r)` on isothermic data.
pub fn t_transform(cd: &ConformalData, r: f64, tols: &Tolerances) -> Result<(ConformalData, DeformationStamp)> {
    let rep = residuals::isothermic_form_residual(cd, tols);
    if !rep.pass {
        return Err(Error::Domain(format!(
            "T-transform needs isothermic data (real kappa solving the isothermic form); \
             max |Im kappa| = {:e}, residual {:e}. A surface is isothermic exactly when it \
             has deformations preserving the conformal Hopf differential",
            rep.extra.get("max_imag_kappa").copied().unwrap_or(f64::NAN),
            rep.max_abs
        )));
    }
    let mut out = cd.clone();
    out.schwarzian = cd.schwarzian.map(|c| c + r);
    // c_zbar is unchanged, so exact derivatives carry over.
    Ok((
        out,
        DeformationStamp {
            family: Family::TTransform,
            parameter: Parameter::Real(r),
            parent_checksum: conformal_checksum(cd),
        },
    ))
}

fn ensure_unit(l: Complex64) -> Result<()> {
    if (l.norm() - 1.0).abs() > UNIT_TOL || !l.re.is_finite() || !l.im.is_finite() {
        return Err(Error::Domain(format!("family parameter must be unimodular, |lambda| = {}", l.norm())));
    }
    Ok(())
}

/// `kappa -> lambda kappa`, `c -> c + (lambda^2 - 1) q`, `q -> lambda q`, `|lambda| = 1`.
///
/// With `q = 0` this is the Willmore associated family and leaves `c` alone.
pub fn constrained_willmore_family(
    cd: &ConformalData,
    lambda: Complex64,
    tols: &Tolerances,
) -> Result<(ConformalData, DeformationStamp)> {
    ensure_unit(lambda)?;
    let chart = *cd.chart();
    let q = cd.q_or_zero();
    if cd.q.is_some() {
        let holo = numgrid::d_zbar(&q)
            .values()
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let (i, j) = chart.node(*k);
                chart.is_interior(i, j, BOUNDARY_COLLAR)
            })
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max);
        let limit = tols.at(tol::HOLOMORPHY, chart.resolution());
        if holo > limit {
            return Err(Error::Domain(format!(
                "q is not holomorphic: max |q_zbar| = {holo:e} exceeds {limit:e}"
            )));
        }
    }
    let shift = lambda * lambda - 1.0;
    let schwarzian = if cd.q.is_some() {
        cd.schwarzian.zip_map(&q, |c, q| c + shift * q)?
    } else {
        cd.schwarzian.clone()
    };
    let out = ConformalData {
        kappa: cd.kappa.scaled(lambda),
        schwarzian,
        q: cd.q.as_ref().map(|q| q.scaled(lambda)),
        // A holomorphic q adds nothing to c_zbar.
        derivatives: cd.derivatives.as_ref().map(|d| d.with_kappa_scaled(lambda)),
    };
    Ok((
        out,
        DeformationStamp {
            family: Family::ConstrainedWillmore,
            parameter: Parameter::Unit {
                re: lambda.re,
                im: lambda.im,
            },
            parent_checksum: conformal_checksum(cd),
        },
    ))
}

/// Consistency diagnostics of a lambda field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaReport {
    /// `max |(log |lambda|^2)_zzbar|` over the interior.
    pub log_modulus_laplacian: f64,
    pub min_modulus: f64,
}

/// `e^omega -> |lambda|^2 e^omega`, `H -> H/|lambda|`, `Q -> lambda Q`.
pub fn metrical_deform(
    md: &MetricalData,
    lambda: &ScalarField,
) -> Result<(MetricalData, LambdaReport, DeformationStamp)> {
    let chart = *md.chart();
    chart.ensure_same(lambda.chart(), "metrical deformation")?;
    let mut min_modulus = f64::INFINITY;
    for (k, l) in lambda.values().iter().enumerate() {
        let m = l.norm();
        if !(m > 0.0) || !m.is_finite() {
            let (i, j) = chart.node(k);
            return Err(Error::Domain(format!("lambda vanishes at node ({i}, {j})")));
        }
        min_modulus = min_modulus.min(m);
    }
    let log_mod = lambda.map_real(|l| l.norm_sqr().ln());
    let lap = numgrid::d_z_zbar(&log_mod);
    let log_modulus_laplacian = chart
        .interior_indices(BOUNDARY_COLLAR)
        .into_iter()
        .map(|k| lap.values()[k].norm())
        .fold(0.0, f64::max);
    let omega = md.omega.zip_map(&log_mod, |w, l| w + l)?.re();
    let mean = md.mean.zip_map(lambda, |h, l| Complex64::new(h.re / l.norm(), 0.0))?.re();
    let hopf = md.hopf.mul(lambda)?;
    let out = MetricalData::new(omega, mean, hopf)?;
    Ok((
        out,
        LambdaReport {
            log_modulus_laplacian,
            min_modulus,
        },
        DeformationStamp {
            family: Family::MetricalLambda,
            parameter: Parameter::Field(checksum(&[lambda])),
            parent_checksum: metrical_checksum(md),
        },
    ))
}

/// Constant `lambda = e^{i theta}` and the Gauss-Codazzi reports of the result.
pub fn bonnet_family_check(
    md: &MetricalData,
    theta: f64,
    tols: &Tolerances,
) -> Result<(MetricalData, [ResidualReport; 2], DeformationStamp)> {
    let lambda = ScalarField::constant(*md.chart(), Complex64::from_polar(1.0, theta));
    let (out, _, mut stamp) = metrical_deform(md, &lambda)?;
    stamp.family = Family::Bonnet;
    stamp.parameter = Parameter::Real(theta);
    let reports = residuals::gauss_codazzi(&out, tols);
    Ok((out, reports, stamp))
}

/// Associated family of a HIMC surface with `1/H = h + conj(h)`, `w = 1 + 2iht`:
/// `e^{omega_t} = e^omega / |w|^4`, `h_t = h / w`, `Q_t = Q / w^2`.
pub fn himc_family(
    omega: &ScalarField,
    h: &ScalarField,
    hopf: &ScalarField,
    t: f64,
    tols: &Tolerances,
) -> Result<(MetricalData, DeformationStamp)> {
    let chart = *omega.chart();
    chart.ensure_same(h.chart(), "himc family")?;
    chart.ensure_same(hopf.chart(), "himc family")?;
    if !t.is_finite() {
        return Err(Error::Domain("family parameter must be finite".into()));
    }
    let holo = numgrid::d_zbar(h);
    let holo_max = chart
        .interior_indices(BOUNDARY_COLLAR)
        .into_iter()
        .map(|k| holo.values()[k].norm())
        .fold(0.0, f64::max);
    let limit = tols.at(tol::HOLOMORPHY, chart.resolution());
    if holo_max > limit {
        return Err(Error::Domain(format!(
            "HIMC potential is not holomorphic: max |h_zbar| = {holo_max:e} exceeds {limit:e}"
        )));
    }
    let mut w = Vec::with_capacity(chart.len());
    for (k, hv) in h.values().iter().enumerate() {
        let wk = 1.0 + 2.0 * I * hv * t;
        if wk.norm() < 1e-12 {
            let (i, j) = chart.node(k);
            return Err(Error::PoleOfFamily { i, j });
        }
        w.push(wk);
    }
    let real = |f: &dyn Fn(usize) -> f64| {
        ScalarField::from_real(chart, (0..chart.len()).map(f).collect()).expect("same chart")
    };
    let omega_t = real(&|k| omega.values()[k].re - 4.0 * w[k].norm().ln());
    let mean_t = real(&|k| 1.0 / (2.0 * (h.values()[k] / w[k]).re));
    let hopf_t = ScalarField::from_values(
        chart,
        numgrid::FieldKind::Complex,
        (0..chart.len()).map(|k| hopf.values()[k] / (w[k] * w[k])).collect(),
    )?;
    Ok((
        MetricalData::new(omega_t, mean_t, hopf_t)?,
        DeformationStamp {
            family: Family::Himc,
            parameter: Parameter::Real(t),
            parent_checksum: checksum(&[omega, h, hopf]),
        },
    ))
}

/// Holomorphic `h` with `h + conj(h) = 1/H`, by path integration of the
/// harmonic conjugate along `j = 0` and then up each column. Assumes a
/// simply connected, open chart; the imaginary constant is fixed by `Im h = 0`
/// at node `(0, 0)`.
pub fn himc_potential_from_mean(mean: &ScalarField) -> Result<ScalarField> {
    let chart = *mean.chart();
    if chart.periodic_x || chart.periodic_y {
        return Err(Error::Domain("harmonic conjugation needs an open chart".into()));
    }
    let u = mean.map_real(|h| 1.0 / h.re);
    let ux = numgrid::d_x(&u);
    let uy = numgrid::d_y(&u);
    // v_x = -u_y, v_y = u_x
    let mut v = vec![0.0; chart.len()];
    for i in 1..chart.nx {
        let (a, b) = (chart.index(i - 1, 0), chart.index(i, 0));
        v[b] = v[a] - 0.5 * chart.dx * (uy.values()[a].re + uy.values()[b].re);
    }
    for i in 0..chart.nx {
        for j in 1..chart.ny {
            let (a, b) = (chart.index(i, j - 1), chart.index(i, j));
            v[b] = v[a] + 0.5 * chart.dy * (ux.values()[a].re + ux.values()[b].re);
        }
    }
    ScalarField::from_values(
        chart,
        numgrid::FieldKind::Complex,
        (0..chart.len())
            .map(|k| 0.5 * Complex64::new(u.values()[k].re, v[k]))
            .collect(),
    )
}

#[cfg(test)]
mod tests;
