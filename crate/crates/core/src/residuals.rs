//! Structural equations as residual fields reduced to reports: metrical and
//! conformal Gauss-Codazzi, the isothermic specialization, Willmore and
//! constrained Willmore, HIMC and special isothermic, plus three-valued
//! classification verdicts under grid refinement.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::invariants::{ConformalData, MetricalData, MINIMAL_H};
use crate::numgrid::{self, ConformalChart, ScalarField, BOUNDARY_COLLAR};
use crate::tolerances::{self as tol, Tolerances};

/// A residual field reduced over the unmasked interior.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub name: String,
    pub max_abs: f64,
    /// `sqrt(sum |r|^2)` over the evaluated nodes.
    pub l2: f64,
    pub mask_fraction: f64,
    pub tolerance: f64,
    /// `max(1, largest term magnitude)`; the report passes when `max_abs <= tolerance * scale`.
    pub scale: f64,
    pub pass: bool,
    pub nodes: usize,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
}

impl ResidualReport {
    fn with(mut self, key: &str, v: f64) -> Self {
        self.extra.insert(key.into(), v);
        self
    }
}

/// Reduces a residual over the interior nodes that are not masked.
fn reduce(
    name: &str,
    chart: &ConformalChart,
    residual: &[Complex64],
    mask: Option<&[bool]>,
    term_scale: f64,
    tolerance: f64,
) -> ResidualReport {
    let masked = |k: usize| mask.is_some_and(|m| m[k]);
    let mut max_abs: f64 = 0.0;
    let mut sum = 0.0;
    let mut nodes = 0;
    for k in chart.interior_indices(BOUNDARY_COLLAR) {
        if masked(k) {
            continue;
        }
        let a = residual[k].norm();
        max_abs = max_abs.max(a);
        sum += a * a;
        nodes += 1;
    }
    let mask_fraction = mask.map_or(0.0, |m| {
        m.iter().filter(|&&b| b).count() as f64 / m.len().max(1) as f64
    });
    let scale = term_scale.max(1.0);
    ResidualReport {
        name: name.into(),
        max_abs,
        l2: sum.sqrt(),
        mask_fraction,
        tolerance,
        scale,
        pass: max_abs <= tolerance * scale,
        nodes,
        extra: BTreeMap::new(),
    }
}

fn max_norm(chart: &ConformalChart, v: &[Complex64], mask: Option<&[bool]>) -> f64 {
    chart
        .interior_indices(BOUNDARY_COLLAR)
        .into_iter()
        .filter(|&k| !mask.is_some_and(|m| m[k]))
        .map(|k| v[k].norm())
        .fold(0.0, f64::max)
}

/// `omega_zzbar + H^2 e^omega / 2 - 2|Q|^2 e^{-omega}` and `Q_zbar - H_z e^omega / 2`.
pub fn gauss_codazzi(md: &MetricalData, tols: &Tolerances) -> [ResidualReport; 2] {
    let chart = *md.chart();
    let n = chart.resolution();
    let wzzb = numgrid::d_z_zbar(&md.omega);
    let qzb = numgrid::d_zbar(&md.hopf);
    let hz = numgrid::d_z(&md.mean);
    let len = chart.len();
    let mut gauss = Vec::with_capacity(len);
    let mut codazzi = Vec::with_capacity(len);
    let (mut sg, mut sc) = (0.0f64, 0.0f64);
    for k in 0..len {
        let e = md.omega.values()[k].re.exp();
        let h = md.mean.values()[k].re;
        let q = md.hopf.values()[k];
        let t = [wzzb.values()[k].re, 0.5 * h * h * e, 2.0 * q.norm_sqr() / e];
        gauss.push(Complex64::new(t[0] + t[1] - t[2], 0.0));
        let u = [qzb.values()[k], 0.5 * hz.values()[k] * e];
        codazzi.push(u[0] - u[1]);
        if chart.is_interior(k % chart.nx, k / chart.nx, BOUNDARY_COLLAR) {
            sg = t.iter().fold(sg, |m, v| m.max(v.abs()));
            sc = u.iter().fold(sc, |m, v| m.max(v.norm()));
        }
    }
    [
        reduce("gauss", &chart, &gauss, None, sg, tols.at(tol::GAUSS, n)),
        reduce("codazzi", &chart, &codazzi, None, sc, tols.at(tol::CODAZZI, n)),
    ]
}

/// Derivatives of `(kappa, c)`: exact when supplied, stencils otherwise.
struct Derivs {
    kz: Vec<Complex64>,
    kzb: Vec<Complex64>,
    kzbzb: Vec<Complex64>,
    czb: Vec<Complex64>,
}

fn derivs(cd: &ConformalData) -> Derivs {
    match &cd.derivatives {
        Some(d) => Derivs {
            kz: d.kappa_z.values().to_vec(),
            kzb: d.kappa_zbar.values().to_vec(),
            kzbzb: d.kappa_zbar_zbar.values().to_vec(),
            czb: d.c_zbar.values().to_vec(),
        },
        None => Derivs {
            kz: numgrid::d_z(&cd.kappa).into_values(),
            kzb: numgrid::d_zbar(&cd.kappa).into_values(),
            kzbzb: numgrid::d_zbar_zbar(&cd.kappa).into_values(),
            czb: numgrid::d_zbar(&cd.schwarzian).into_values(),
        },
    }
}

/// Pointwise Willmore operator `kappa_zbarzbar + cbar kappa / 2` and its term scale.
fn willmore_field(cd: &ConformalData, d: &Derivs) -> (Vec<Complex64>, Vec<f64>) {
    let mut w = Vec::with_capacity(d.kzbzb.len());
    let mut s = Vec::with_capacity(d.kzbzb.len());
    for k in 0..d.kzbzb.len() {
        let a = d.kzbzb[k];
        let b = 0.5 * cd.schwarzian.values()[k].conj() * cd.kappa.values()[k];
        w.push(a + b);
        s.push(a.norm().max(b.norm()));
    }
    (w, s)
}

fn interior_max(chart: &ConformalChart, v: &[f64]) -> f64 {
    chart
        .interior_indices(BOUNDARY_COLLAR)
        .into_iter()
        .map(|k| v[k])
        .fold(0.0, f64::max)
}

/// Conformal Gauss `c_zbar/2 - (3 conj(kappa)_z kappa + conj(kappa) kappa_z)`
/// and conformal Codazzi `Im(kappa_zbarzbar + cbar kappa / 2)`.
pub fn conformal_gauss_codazzi(cd: &ConformalData, tols: &Tolerances) -> [ResidualReport; 2] {
    let chart = *cd.chart();
    let n = chart.resolution();
    let d = derivs(cd);
    let mut gauss = Vec::with_capacity(chart.len());
    let mut gs = Vec::with_capacity(chart.len());
    for k in 0..chart.len() {
        let kap = cd.kappa.values()[k];
        // d_z of conj(kappa) is conj(d_zbar kappa).
        let kbar_z = d.kzb[k].conj();
        let t = [0.5 * d.czb[k], 3.0 * kbar_z * kap, kap.conj() * d.kz[k]];
        gauss.push(t[0] - (t[1] + t[2]));
        gs.push(t.iter().fold(0.0f64, |m, v| m.max(v.norm())));
    }
    let (w, ws) = willmore_field(cd, &d);
    let codazzi: Vec<Complex64> = w.iter().map(|v| Complex64::new(v.im, 0.0)).collect();
    [
        reduce(
            "conformal_gauss",
            &chart,
            &gauss,
            None,
            interior_max(&chart, &gs),
            tols.at(tol::CONFORMAL_GAUSS, n),
        ),
        reduce(
            "conformal_codazzi",
            &chart,
            &codazzi,
            None,
            interior_max(&chart, &ws),
            tols.at(tol::CONFORMAL_CODAZZI, n),
        ),
    ]
}

/// `c_zbar - 4 (kappa^2)_z` for isothermic data; `max_imag_kappa` and an
/// `isothermic` indicator (1 or 0) are reported alongside.
pub fn isothermic_form_residual(cd: &ConformalData, tols: &Tolerances) -> ResidualReport {
    let chart = *cd.chart();
    let n = chart.resolution();
    let d = derivs(cd);
    let mut r = Vec::with_capacity(chart.len());
    let mut s = Vec::with_capacity(chart.len());
    for k in 0..chart.len() {
        let a = d.czb[k];
        let b = 8.0 * cd.kappa.values()[k] * d.kz[k];
        r.push(a - b);
        s.push(a.norm().max(b.norm()));
    }
    let imag = max_norm(
        &chart,
        &cd.kappa.values().iter().map(|v| Complex64::new(v.im, 0.0)).collect::<Vec<_>>(),
        None,
    );
    let kscale = cd.kappa.scale();
    let real = imag <= tols.at(tol::REAL_KAPPA, REFERENCE) * kscale;
    let mut rep = reduce(
        "isothermic_form",
        &chart,
        &r,
        None,
        interior_max(&chart, &s),
        tols.at(tol::ISOTHERMIC, n),
    );
    rep.pass &= real;
    rep.with("max_imag_kappa", imag)
        .with("isothermic", if real { 1.0 } else { 0.0 })
}

const REFERENCE: usize = tol::REFERENCE_NODES;

/// `kappa_zbarzbar + cbar kappa / 2`.
pub fn willmore_residual(cd: &ConformalData, tols: &Tolerances) -> ResidualReport {
    let chart = *cd.chart();
    let d = derivs(cd);
    let (w, s) = willmore_field(cd, &d);
    reduce(
        "willmore",
        &chart,
        &w,
        None,
        interior_max(&chart, &s),
        tols.at(tol::WILLMORE, chart.resolution()),
    )
}

/// The Willmore residual field itself, for pointwise checks.
pub fn willmore_field_values(cd: &ConformalData) -> ScalarField {
    let d = derivs(cd);
    let (w, _) = willmore_field(cd, &d);
    ScalarField::from_values(*cd.chart(), numgrid::FieldKind::Complex, w).expect("same chart")
}

/// `kappa_zbarzbar + cbar kappa / 2 - Re(qbar kappa)`, with `max |q_zbar|` as `holomorphy`.
pub fn constrained_willmore_residual(cd: &ConformalData, tols: &Tolerances) -> ResidualReport {
    let chart = *cd.chart();
    let d = derivs(cd);
    let (mut w, mut s) = willmore_field(cd, &d);
    let mut holomorphy = 0.0;
    if let Some(q) = &cd.q {
        for k in 0..chart.len() {
            let t = (q.values()[k].conj() * cd.kappa.values()[k]).re;
            w[k] -= t;
            s[k] = s[k].max(t.abs());
        }
        holomorphy = max_norm(&chart, numgrid::d_zbar(q).values(), None);
    }
    let mut rep = reduce(
        "constrained_willmore",
        &chart,
        &w,
        None,
        interior_max(&chart, &s),
        tols.at(tol::CONSTRAINED_WILLMORE, chart.resolution()),
    );
    let holo_ok = holomorphy <= tols.at(tol::HOLOMORPHY, chart.resolution());
    rep.pass &= holo_ok;
    rep.with("holomorphy", holomorphy)
}

/// Constant real `q` minimizing the constrained Willmore residual in least squares.
pub fn fit_constant_q(cd: &ConformalData) -> Complex64 {
    let chart = *cd.chart();
    let d = derivs(cd);
    let (w, _) = willmore_field(cd, &d);
    // w - Re(conj(q) kappa) with q = a + ib is w - (a Re kappa + b Im kappa).
    let nodes = chart.interior_indices(BOUNDARY_COLLAR);
    let a = DMatrix::from_fn(2 * nodes.len(), 2, |r, c| {
        let kap = cd.kappa.values()[nodes[r / 2]];
        if r % 2 == 0 {
            [kap.re, kap.im][c]
        } else {
            0.0
        }
    });
    let b = DVector::from_fn(2 * nodes.len(), |r, _| {
        let v = w[nodes[r / 2]];
        if r % 2 == 0 {
            v.re
        } else {
            v.im
        }
    });
    let (x, _, _) = min_norm_lstsq(a, b, 1e-14);
    Complex64::new(x[0], x[1])
}

/// Minimum-norm least squares by a complete orthogonal decomposition: a
/// column-pivoted QR, truncated at `rel |r_00|`, then an LQ step on the kept
/// rows. Returns the solution, the numerical rank and `|r_00| / |r_kk|`.
/// nalgebra's SVD misreports tall rank-deficient systems, so it is avoided.
fn min_norm_lstsq(a: DMatrix<f64>, b: DVector<f64>, rel: f64) -> (DVector<f64>, usize, f64) {
    let n = a.ncols();
    let cp = a.col_piv_qr();
    let r = cp.r();
    let c = cp.q().transpose() * b;
    let diag: Vec<f64> = (0..r.nrows().min(n)).map(|k| r[(k, k)].abs()).collect();
    let top = diag.first().copied().unwrap_or(0.0);
    let rank = diag.iter().take_while(|&&d| d > rel * top && d > 0.0).count();
    if rank == 0 {
        return (DVector::zeros(n), 0, f64::INFINITY);
    }
    let condition = if rank == n { top / diag[n - 1] } else { f64::INFINITY };
    // R1 = T^T Q2^T from the QR of R1^T, so x = Q2 T^-T c.
    let lq = r.rows(0, rank).transpose().qr();
    let t = lq.r();
    let y = t
        .transpose()
        .solve_lower_triangular(&c.rows(0, rank).into_owned())
        .unwrap_or_else(|| DVector::zeros(rank));
    let mut x = lq.q() * y;
    cp.p().inv_permute_rows(&mut x);
    (x, rank, condition)
}

/// `H_zzbar - 2|H_z|^2 / H`, masking `|H| <= 1e-8`; reports `max |(1/H)_zzbar|` as `laplacian_inverse`.
pub fn himc_residual(mean: &ScalarField, tols: &Tolerances) -> ResidualReport {
    let chart = *mean.chart();
    let mask: Vec<bool> = mean.values().iter().map(|h| h.re.abs() <= MINIMAL_H).collect();
    let hzzb = numgrid::d_z_zbar(mean);
    let hz = numgrid::d_z(mean);
    let mut r = Vec::with_capacity(chart.len());
    let mut s = Vec::with_capacity(chart.len());
    for k in 0..chart.len() {
        if mask[k] {
            r.push(Complex64::new(0.0, 0.0));
            s.push(0.0);
            continue;
        }
        let a = hzzb.values()[k].re;
        let b = 2.0 * hz.values()[k].norm_sqr() / mean.values()[k].re;
        r.push(Complex64::new(a - b, 0.0));
        s.push(a.abs().max(b.abs()));
    }
    let inv = ScalarField::from_real(
        chart,
        (0..chart.len())
            .map(|k| if mask[k] { 0.0 } else { 1.0 / mean.values()[k].re })
            .collect(),
    )
    .expect("same chart");
    let lap = numgrid::d_z_zbar(&inv);
    let lap_max = max_norm(&chart, lap.values(), Some(&mask));
    let term = chart
        .interior_indices(BOUNDARY_COLLAR)
        .into_iter()
        .filter(|&k| !mask[k])
        .map(|k| s[k])
        .fold(0.0, f64::max);
    reduce(
        "himc",
        &chart,
        &r,
        Some(&mask),
        term,
        tols.at(tol::HIMC, chart.resolution()),
    )
    .with("laplacian_inverse", lap_max)
}

/// Fields entering the special isothermic equation.
struct SpecialTerms {
    grad: Vec<f64>,
    m: Vec<f64>,
    h: Vec<f64>,
    ell: Vec<f64>,
}

fn special_terms(md: &MetricalData) -> SpecialTerms {
    let chart = *md.chart();
    let hx = numgrid::d_x(&md.mean);
    let hy = numgrid::d_y(&md.mean);
    let mut t = SpecialTerms {
        grad: Vec::with_capacity(chart.len()),
        m: Vec::with_capacity(chart.len()),
        h: Vec::with_capacity(chart.len()),
        ell: Vec::with_capacity(chart.len()),
    };
    for k in 0..chart.len() {
        let e = md.omega.values()[k].re.exp();
        let h = md.mean.values()[k].re;
        // ell = 2 e^omega sqrt(H^2 - K) = 4|Q| by the Gauss equation.
        let ell = 4.0 * md.hopf.values()[k].norm();
        t.grad.push(4.0 * e * (hx.values()[k].re.powi(2) + hy.values()[k].re.powi(2)));
        t.m.push(-h * ell);
        t.h.push(h);
        t.ell.push(ell);
    }
    t
}

/// `4 e^omega |grad H|^2 + m^2 + 2A m + 2B H + 2C ell + D`, `ell = 2 e^omega h`, `m = -H ell`.
pub fn special_isothermic_residual(
    md: &MetricalData,
    coeffs: [f64; 4],
    tols: &Tolerances,
) -> ResidualReport {
    let chart = *md.chart();
    let t = special_terms(md);
    let [a, b, c, d] = coeffs;
    let mut r = Vec::with_capacity(chart.len());
    let mut s = Vec::with_capacity(chart.len());
    for k in 0..chart.len() {
        let terms = [
            t.grad[k],
            t.m[k] * t.m[k],
            2.0 * a * t.m[k],
            2.0 * b * t.h[k],
            2.0 * c * t.ell[k],
            d,
        ];
        r.push(Complex64::new(terms.iter().sum(), 0.0));
        s.push(terms.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    reduce(
        "special_isothermic",
        &chart,
        &r,
        None,
        interior_max(&chart, &s),
        tols.at(tol::SPECIAL_ISOTHERMIC, chart.resolution()),
    )
}

/// Least-squares constants of the special isothermic equation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecialFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub condition: f64,
    pub rank: usize,
    pub report: ResidualReport,
}

/// Fits `(2A, 2B, 2C, D)` over the interior by min-norm least squares.
pub fn fit_special_isothermic(md: &MetricalData, tols: &Tolerances) -> SpecialFit {
    let chart = *md.chart();
    let t = special_terms(md);
    let nodes = chart.interior_indices(BOUNDARY_COLLAR);
    let a = DMatrix::from_fn(nodes.len(), 4, |r, c| {
        let k = nodes[r];
        [t.m[k], t.h[k], t.ell[k], 1.0][c]
    });
    let b = DVector::from_fn(nodes.len(), |r, _| {
        let k = nodes[r];
        -(t.grad[k] + t.m[k] * t.m[k])
    });
    let (x, rank, condition) = min_norm_lstsq(a, b, 1e-12);
    let coeffs = [0.5 * x[0], 0.5 * x[1], 0.5 * x[2], x[3]];
    let report = special_isothermic_residual(md, coeffs, tols)
        .with("condition", condition)
        .with("rank", rank as f64);
    SpecialFit {
        a: coeffs[0],
        b: coeffs[1],
        c: coeffs[2],
        d: coeffs[3],
        condition,
        rank,
        report,
    }
}

/// `3 conj(lambda)_z lambda + conj(lambda) lambda_z`, which must vanish for
/// `(lambda kappa, c)` to stay integrable when `(kappa, c)` is.
pub fn multiplier_residual(lambda: &ScalarField, tols: &Tolerances) -> ResidualReport {
    let chart = *lambda.chart();
    let lz = numgrid::d_z(lambda);
    let lzb = numgrid::d_zbar(lambda);
    let mut r = Vec::with_capacity(chart.len());
    let mut s = Vec::with_capacity(chart.len());
    for k in 0..chart.len() {
        let l = lambda.values()[k];
        let a = 3.0 * lzb.values()[k].conj() * l;
        let b = l.conj() * lz.values()[k];
        r.push(a + b);
        s.push(a.norm().max(b.norm()));
    }
    reduce(
        "multiplier",
        &chart,
        &r,
        None,
        interior_max(&chart, &s),
        tols.at(tol::CONFORMAL_GAUSS, chart.resolution()),
    )
}

/// Three-valued classification verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    InsufficientResolution,
}

/// Verdict from a fine report and, optionally, the same residual at half resolution.
///
/// A failing fine residual counts as under-resolved when it lies within 3x of
/// its distance to the Richardson limit `(4 r_n - r_{n/2})/3`.
pub fn verdict(fine: &ResidualReport, coarse: Option<&ResidualReport>) -> Verdict {
    if fine.pass {
        return Verdict::Pass;
    }
    let Some(coarse) = coarse else {
        return Verdict::Fail;
    };
    let limit = (4.0 * fine.max_abs - coarse.max_abs) / 3.0;
    if fine.max_abs <= 3.0 * (fine.max_abs - limit).abs() {
        Verdict::InsufficientResolution
    } else {
        Verdict::Fail
    }
}

/// Residuals at or below this level are treated as exact when comparing grids.
pub const NOISE_FLOOR: f64 = 1e-10;

/// Whether refinement from `coarse` to `fine` reduced the residual by at least `factor`.
pub fn decreased_by(coarse: &ResidualReport, fine: &ResidualReport, factor: f64) -> bool {
    (coarse.max_abs <= NOISE_FLOOR && fine.max_abs <= NOISE_FLOOR)
        || fine.max_abs * factor <= coarse.max_abs
}
