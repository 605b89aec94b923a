//! Minkowski 5-space with signature `(-,+,+,+,+)`: lightcone lifts of surfaces
//! in R^3, the normalized lift and its Hill decomposition, and the central
//! sphere congruence as an independent route to the Moebius metric.
//!
//! R^3 is embedded by the paraboloid section
//! `x -> ((1+|x|^2)/2, x, (1-|x|^2)/2)`, whose induced metric is Euclidean.

use std::io::Write;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix4, SMatrix, SVector, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::{
    self, DerivativeSource, FactorJet, Jet3, SurfacePatch, CONFORMALITY_TOL_ANALYTIC,
    CONFORMALITY_TOL_FD,
};
use crate::numgrid::{along_axis, stencil, ConformalChart, FieldKind, ScalarField, BOUNDARY_COLLAR};

const ETA: [f64; 5] = [-1.0, 1.0, 1.0, 1.0, 1.0];

/// A vector of Minkowski 5-space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct MinkVec(pub [f64; 5]);

impl MinkVec {
    pub const fn new(c: [f64; 5]) -> Self {
        Self(c)
    }

    /// Standard basis vector `e_k`.
    pub fn basis(k: usize) -> Self {
        let mut c = [0.0; 5];
        c[k] = 1.0;
        Self(c)
    }

    pub fn dot(&self, o: &MinkVec) -> f64 {
        mink_dot(self, o)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `<a, b> = -a0 b0 + a1 b1 + a2 b2 + a3 b3 + a4 b4`.
pub fn mink_dot(a: &MinkVec, b: &MinkVec) -> f64 {
    (0..5).map(|k| ETA[k] * a.0[k] * b.0[k]).sum()
}

impl Add for MinkVec {
    type Output = MinkVec;
    fn add(self, o: MinkVec) -> MinkVec {
        MinkVec(std::array::from_fn(|k| self.0[k] + o.0[k]))
    }
}

impl Sub for MinkVec {
    type Output = MinkVec;
    fn sub(self, o: MinkVec) -> MinkVec {
        MinkVec(std::array::from_fn(|k| self.0[k] - o.0[k]))
    }
}

impl Mul<f64> for MinkVec {
    type Output = MinkVec;
    fn mul(self, s: f64) -> MinkVec {
        MinkVec(self.0.map(|v| v * s))
    }
}

impl Neg for MinkVec {
    type Output = MinkVec;
    fn neg(self) -> MinkVec {
        self * -1.0
    }
}

/// Complexified Minkowski vector, for `d/dz` derivatives of lifts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMinkVec(pub [Complex64; 5]);

impl CMinkVec {
    /// `a + i b`.
    pub fn from_parts(a: &MinkVec, b: &MinkVec) -> Self {
        Self(std::array::from_fn(|k| Complex64::new(a.0[k], b.0[k])))
    }

    pub fn re(&self) -> MinkVec {
        MinkVec(self.0.map(|v| v.re))
    }

    pub fn im(&self) -> MinkVec {
        MinkVec(self.0.map(|v| v.im))
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|v| v.conj()))
    }

    /// Complex-bilinear extension of the Lorentz product.
    pub fn dot(&self, o: &CMinkVec) -> Complex64 {
        (0..5).map(|k| ETA[k] * self.0[k] * o.0[k]).sum()
    }

    pub fn dot_real(&self, o: &MinkVec) -> Complex64 {
        (0..5).map(|k| ETA[k] * self.0[k] * o.0[k]).sum()
    }

    pub fn add_scaled(&self, a: Complex64, v: &MinkVec) -> Self {
        Self(std::array::from_fn(|k| self.0[k] + a * v.0[k]))
    }
}

/// A lift with its chart derivatives up to second order at one node.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LiftJet {
    pub v: MinkVec,
    pub vx: MinkVec,
    pub vy: MinkVec,
    pub vxx: MinkVec,
    pub vxy: MinkVec,
    pub vyy: MinkVec,
}

impl LiftJet {
    pub fn d_z(&self) -> CMinkVec {
        CMinkVec::from_parts(&(self.vx * 0.5), &(self.vy * -0.5))
    }

    pub fn d_zz(&self) -> CMinkVec {
        CMinkVec::from_parts(&((self.vxx - self.vyy) * 0.25), &(self.vxy * -0.5))
    }

    pub fn d_z_zbar(&self) -> MinkVec {
        (self.vxx + self.vyy) * 0.25
    }

    fn scaled_by(&self, m: [f64; 6]) -> Self {
        let [mu, mx, my, mxx, mxy, myy] = m;
        let p = self;
        LiftJet {
            v: p.v * mu,
            vx: p.v * mx + p.vx * mu,
            vy: p.v * my + p.vy * mu,
            vxx: p.v * mxx + p.vx * (2.0 * mx) + p.vxx * mu,
            vxy: p.v * mxy + p.vx * my + p.vy * mx + p.vxy * mu,
            vyy: p.v * myy + p.vy * (2.0 * my) + p.vyy * mu,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LiftKind {
    Euclidean,
    Normalized,
}

/// A lift of a patch into the lightcone, one jet per node.
#[derive(Debug, Clone)]
pub struct LiftField {
    pub chart: ConformalChart,
    pub kind: LiftKind,
    pub jets: Vec<LiftJet>,
}

impl LiftField {
    pub fn values(&self) -> Vec<MinkVec> {
        self.jets.iter().map(|j| j.v).collect()
    }

    /// Largest `|<v,v>|` over `(1 + |v|^2)^2`, and whether every `v_0 > 0`.
    pub fn lightcone_check(&self) -> (f64, bool) {
        let mut worst: f64 = 0.0;
        let mut future = true;
        for j in &self.jets {
            let s = 1.0 + j.v.0.iter().map(|c| c * c).sum::<f64>();
            worst = worst.max(mink_dot(&j.v, &j.v).abs() / (s * s));
            future &= j.v.0[0] > 0.0;
        }
        (worst, future)
    }

    /// Max of `|<psi_z, psi_zbar> - 1/2|` and of `|<psi_z, psi_z>|` over the given nodes.
    pub fn normalization_check(&self, nodes: &[usize]) -> (f64, f64) {
        nodes.iter().fold((0.0f64, 0.0f64), |(a, b), &k| {
            let z = self.jets[k].d_z();
            ((a.max((z.dot(&z.conj()) - 0.5).norm())), b.max(z.dot(&z).norm()))
        })
    }
}

/// Paraboloid-section image of a point of R^3.
pub fn lift_point(x: &invariants::V3) -> MinkVec {
    let p = 0.5 * x.norm_squared();
    MinkVec([0.5 + p, x[0], x[1], x[2], 0.5 - p])
}

fn euclidean_jet(j: &Jet3) -> LiftJet {
    let f = &j.f;
    let px = f.dot(&j.fx);
    let py = f.dot(&j.fy);
    let pxx = j.fx.dot(&j.fx) + f.dot(&j.fxx);
    let pxy = j.fx.dot(&j.fy) + f.dot(&j.fxy);
    let pyy = j.fy.dot(&j.fy) + f.dot(&j.fyy);
    let d = |s: f64, v: &invariants::V3| MinkVec([s, v[0], v[1], v[2], -s]);
    LiftJet {
        v: lift_point(f),
        vx: d(px, &j.fx),
        vy: d(py, &j.fy),
        vxx: d(pxx, &j.fxx),
        vxy: d(pxy, &j.fxy),
        vyy: d(pyy, &j.fyy),
    }
}

/// `phi = ((1+|F|^2)/2, F, (1-|F|^2)/2)` with its chart derivatives.
pub fn euclidean_lift(patch: &SurfacePatch) -> LiftField {
    LiftField {
        chart: *patch.chart(),
        kind: LiftKind::Euclidean,
        jets: patch.jets().par_iter().map(euclidean_jet).collect(),
    }
}

/// `psi = e^{-omega/2} phi`, normalized so that `<d psi, d psi> = dz dzbar`.
pub fn normalized_lift(patch: &SurfacePatch) -> Result<LiftField> {
    let tol = match patch.source() {
        DerivativeSource::Analytic => CONFORMALITY_TOL_ANALYTIC,
        DerivativeSource::FiniteDifference => CONFORMALITY_TOL_FD,
    };
    let (_, residual) = invariants::first_fundamental(patch)?;
    if residual > tol {
        return Err(Error::Domain(format!(
            "normalized lift needs a conformal chart; conformality residual {residual:e} exceeds {tol:e}"
        )));
    }
    let chart = *patch.chart();
    let jets = patch
        .jets()
        .par_iter()
        .map(|j| {
            let e = FactorJet::of_jet(j);
            // l = log mu = -log(E)/2
            let lx = -0.5 * e.e_x / e.e;
            let ly = -0.5 * e.e_y / e.e;
            let lxx = -0.5 * (e.e_xx / e.e - (e.e_x / e.e).powi(2));
            let lxy = -0.5 * (e.e_xy / e.e - e.e_x * e.e_y / (e.e * e.e));
            let lyy = -0.5 * (e.e_yy / e.e - (e.e_y / e.e).powi(2));
            let mu = e.e.powf(-0.5);
            euclidean_jet(j).scaled_by([
                mu,
                mu * lx,
                mu * ly,
                mu * (lxx + lx * lx),
                mu * (lxy + lx * ly),
                mu * (lyy + ly * ly),
            ])
        })
        .collect();
    Ok(LiftField {
        chart,
        kind: LiftKind::Normalized,
        jets,
    })
}

/// Generalized cross product: the vector Lorentz-orthogonal to four others.
fn lorentz_complement(rows: [&MinkVec; 4]) -> MinkVec {
    let m = SMatrix::<f64, 4, 5>::from_fn(|r, c| rows[r].0[c]);
    let mut w = [0.0; 5];
    for (k, wk) in w.iter_mut().enumerate() {
        let minor = Matrix4::from_fn(|r, c| m[(r, if c < k { c } else { c + 1 })]);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        // Raising the index turns Euclidean orthogonality into Lorentz orthogonality.
        *wk = ETA[k] * sign * minor.determinant();
    }
    MinkVec(w)
}

/// Per-node output of the Hill decomposition `psi_zz + (c/2) psi = kappa`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HillNode {
    pub c: Complex64,
    pub kappa: CMinkVec,
    pub kappa_norm: f64,
    /// Unit normal of the mean curvature sphere, spanning the complement of
    /// `span(psi, psi_z, psi_zbar, psi_zzbar)`.
    pub sphere: MinkVec,
    pub dual: MinkVec,
}

#[derive(Debug, Clone)]
pub struct HillDecomposition {
    pub chart: ConformalChart,
    pub c: ScalarField,
    pub kappa_vec: Vec<CMinkVec>,
    pub kappa_norm: ScalarField,
    pub nodes: Vec<HillNode>,
}

impl HillDecomposition {
    /// Max of `|<kappa, psi>|` and `|<kappa, psi_z>|` over all nodes.
    pub fn tangential_residual(&self, psi: &LiftField) -> f64 {
        self.kappa_vec
            .iter()
            .zip(&psi.jets)
            .map(|(k, j)| k.dot_real(&j.v).norm().max(k.dot(&j.d_z()).norm()))
            .fold(0.0, f64::max)
    }
}

fn hill_node(j: &LiftJet) -> Option<HillNode> {
    let pzzb = j.d_z_zbar();
    let s = lorentz_complement([&j.v, &j.vx, &j.vy, &pzzb]);
    let ss = mink_dot(&s, &s);
    let scale = [&j.v, &j.vx, &j.vy, &pzzb]
        .iter()
        .map(|v| v.max_abs())
        .product::<f64>();
    if !(ss > 1e-20 * scale * scale) {
        return None;
    }
    let s = s * (1.0 / ss.sqrt());
    // <xi, psi> = -1, <xi, psi_x> = <xi, psi_y> = <xi, S> = 0, min-norm solution.
    let rows = [&j.v, &j.vx, &j.vy, &s];
    let a = SMatrix::<f64, 4, 5>::from_fn(|r, c| ETA[c] * rows[r].0[c]);
    let b = Vector4::new(-1.0, 0.0, 0.0, 0.0);
    let xi: SVector<f64, 5> = a.svd(true, true).solve(&b, 1e-14).ok()?;
    let mut dual = MinkVec(std::array::from_fn(|k| xi[k]));
    // The remaining freedom is along psi; one step lands on the null cone exactly.
    let t = 0.5 * mink_dot(&dual, &dual);
    dual = dual + j.v * t;
    let pzz = j.d_zz();
    let c = -2.0 * pzz.dot_real(&dual);
    let kappa = pzz.add_scaled(0.5 * c, &j.v);
    let kappa_norm = kappa.dot(&kappa.conj()).re.max(0.0).sqrt();
    Some(HillNode {
        c,
        kappa,
        kappa_norm,
        sphere: s,
        dual,
    })
}

/// Hill decomposition of a normalized lift.
pub fn hill_decomposition(psi: &LiftField) -> Result<HillDecomposition> {
    if psi.kind != LiftKind::Normalized {
        return Err(Error::Domain("hill decomposition needs the normalized lift".into()));
    }
    let nodes: Vec<Option<HillNode>> = psi.jets.par_iter().map(hill_node).collect();
    let mut out = Vec::with_capacity(nodes.len());
    for (k, n) in nodes.into_iter().enumerate() {
        match n {
            Some(n) => out.push(n),
            None => {
                let (i, j) = psi.chart.node(k);
                return Err(Error::UmbilicFrame { i, j });
            }
        }
    }
    let chart = psi.chart;
    let c = ScalarField::from_values(chart, FieldKind::Complex, out.iter().map(|n| n.c).collect())?;
    let kappa_norm = ScalarField::from_real(chart, out.iter().map(|n| n.kappa_norm).collect())?;
    Ok(HillDecomposition {
        chart,
        c,
        kappa_vec: out.iter().map(|n| n.kappa).collect(),
        kappa_norm,
        nodes: out,
    })
}

/// One Minkowski vector per node.
#[derive(Debug, Clone)]
pub struct MinkField {
    pub chart: ConformalChart,
    pub values: Vec<MinkVec>,
}

impl MinkField {
    /// CSV with header `i,j,c0,c1,c2,c3,c4`, rows in j then i.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["i", "j", "c0", "c1", "c2", "c3", "c4"])?;
        for (k, v) in self.values.iter().enumerate() {
            let (i, j) = self.chart.node(k);
            let mut rec = vec![i.to_string(), j.to_string()];
            rec.extend(v.0.iter().map(|c| format!("{c:.17e}")));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    fn derivative(&self, axis: usize) -> Vec<MinkVec> {
        along_axis(&self.chart, &self.values, axis, stencil::first)
    }
}

/// `S = H phi + (<x,n>, n, -<x,n>)`, the central sphere congruence.
pub fn central_sphere_congruence(patch: &SurfacePatch) -> Result<MinkField> {
    let (h, _) = invariants::mean_and_gauss(patch)?;
    let n = invariants::unit_normal(patch)?;
    let values = patch
        .jets()
        .iter()
        .enumerate()
        .map(|(k, j)| {
            let nv = invariants::V3::new(n[0].values()[k].re, n[1].values()[k].re, n[2].values()[k].re);
            let xn = j.f.dot(&nv);
            lift_point(&j.f) * h.values()[k].re + MinkVec([xn, nv[0], nv[1], nv[2], -xn])
        })
        .collect();
    Ok(MinkField {
        chart: *patch.chart(),
        values,
    })
}

/// Comparison of `<dS, dS>` with `(H^2 - K) I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CongruenceCheck {
    /// Max of `|<S_x,S_x> - m|`, `|<S_y,S_y> - m|`, `|<S_x,S_y>|` over the
    /// interior, divided by `max(1, max m)` with `m = (H^2-K) e^omega`.
    pub max_relative: f64,
    /// Largest `|<S,S> - 1|`.
    pub de_sitter: f64,
    /// Largest `|<S, phi>|`, `|<S, phi_x>|`, `|<S, phi_y>|`.
    pub incidence: f64,
}

pub fn congruence_check(patch: &SurfacePatch) -> Result<CongruenceCheck> {
    let s = central_sphere_congruence(patch)?;
    let inv = invariants::SurfaceInvariants::compute(patch)?;
    let m = inv.mobius_factor_metrical();
    let sx = s.derivative(0);
    let sy = s.derivative(1);
    let scale = m.values().iter().map(|v| v.re).fold(1.0, f64::max);
    let mut worst: f64 = 0.0;
    for k in patch.chart().interior_indices(BOUNDARY_COLLAR) {
        let mk = m.values()[k].re;
        worst = worst
            .max((mink_dot(&sx[k], &sx[k]) - mk).abs())
            .max((mink_dot(&sy[k], &sy[k]) - mk).abs())
            .max(mink_dot(&sx[k], &sy[k]).abs());
    }
    let phi = euclidean_lift(patch);
    let mut de_sitter: f64 = 0.0;
    let mut incidence: f64 = 0.0;
    for (v, j) in s.values.iter().zip(&phi.jets) {
        de_sitter = de_sitter.max((mink_dot(v, v) - 1.0).abs());
        incidence = incidence
            .max(mink_dot(v, &j.v).abs())
            .max(mink_dot(v, &j.vx).abs())
            .max(mink_dot(v, &j.vy).abs());
    }
    Ok(CongruenceCheck {
        max_relative: worst / scale,
        de_sitter,
        incidence,
    })
}

/// `H_v = -v0_perp - <v0_perp, v0_perp> v` with `v0_perp = v0 - <v0, v> v`.
pub fn sphere_mean_curvature_vector(v: &MinkVec, v0: &MinkVec) -> Result<MinkVec> {
    let vv = mink_dot(v, v);
    if (vv - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!("sphere vector must satisfy <v,v> = 1, got {vv}")));
    }
    let perp = *v0 - *v * mink_dot(v0, v);
    Ok(-perp - *v * mink_dot(&perp, &perp))
}

#[cfg(test)]
mod tests;
