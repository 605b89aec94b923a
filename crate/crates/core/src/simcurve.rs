//! Similarity geometry of plane curves: Euclidean and similarity curvature,
//! the angle parameter, the similarity Frenet frame, curve reconstruction from
//! `u = kappa_S`, and the curvature flow `u_t = u_ss - 2 u u_s` (f = -1).
//!
//! Points are stored as complex numbers `x + iy`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numgrid::{stencil, BOUNDARY_COLLAR};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Allowed deviation of `|gamma'|` from 1 for arclength samples.
pub const UNIT_SPEED_TOL: f64 = 1e-6;
/// Regularity threshold on `|gamma'|`.
pub const MIN_SPEED: f64 = 1e-8;
/// Stability factor for the explicit flow, `dt <= 0.4 ds^2`.
pub const STABILITY_FACTOR: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamKind {
    EuclideanArclength,
    SimilarityArclength,
}

/// Uniformly sampled plane curve.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneCurveSamples {
    pub kind: ParamKind,
    /// Parameter spacing.
    pub h: f64,
    /// Parameter of the first sample.
    pub start: f64,
    pub points: Vec<Complex64>,
    /// Periodic samples; the last point does not repeat the first.
    pub closed: bool,
}

fn interior_with(n: usize, closed: bool, collar: usize) -> std::ops::Range<usize> {
    if closed {
        0..n
    } else {
        collar..n.saturating_sub(collar)
    }
}

fn interior(n: usize, closed: bool) -> std::ops::Range<usize> {
    interior_with(n, closed, BOUNDARY_COLLAR)
}

/// Quantities differentiated twice in sequence pick up the low-order end
/// stencils one collar further in.
fn nested_interior(n: usize, closed: bool) -> std::ops::Range<usize> {
    interior_with(n, closed, 2 * BOUNDARY_COLLAR)
}

impl PlaneCurveSamples {
    pub fn new(
        kind: ParamKind,
        h: f64,
        start: f64,
        points: Vec<Complex64>,
        closed: bool,
    ) -> Result<Self> {
        if points.len() < 2 * BOUNDARY_COLLAR + 4 {
            return Err(Error::Domain(format!(
                "need at least {} curve samples, got {}",
                2 * BOUNDARY_COLLAR + 4,
                points.len()
            )));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Domain(format!("parameter spacing must be positive, got {h}")));
        }
        let c = Self {
            kind,
            h,
            start,
            points,
            closed,
        };
        let d = c.first();
        for (k, v) in d.iter().enumerate() {
            if !(v.norm() > MIN_SPEED) {
                return Err(Error::Domain(format!("curve is not regular at sample {k}")));
            }
        }
        if kind == ParamKind::EuclideanArclength {
            for k in interior(d.len(), closed) {
                let dev = (d[k].norm() - 1.0).abs();
                if dev > UNIT_SPEED_TOL {
                    return Err(Error::Domain(format!(
                        "arclength samples have |gamma'| - 1 = {dev:e} at sample {k}"
                    )));
                }
            }
        }
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn params(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.start + k as f64 * self.h).collect()
    }

    pub fn first(&self) -> Vec<Complex64> {
        stencil::first(&self.points, self.h, self.closed)
    }

    pub fn second(&self) -> Vec<Complex64> {
        stencil::second(&self.points, self.h, self.closed)
    }

    /// Samples away from the open ends, where the stencils are 4th order.
    pub fn interior(&self) -> std::ops::Range<usize> {
        interior(self.len(), self.closed)
    }

    /// Samples where a derivative of a derivative is 4th order.
    pub fn nested_interior(&self) -> std::ops::Range<usize> {
        nested_interior(self.len(), self.closed)
    }

    /// Image under `x -> s e^{i angle} x + b`. Arclength spacing scales by `s`;
    /// similarity arclength is unchanged.
    pub fn transformed(&self, s: f64, angle: f64, b: Complex64) -> Result<Self> {
        let m = s * Complex64::from_polar(1.0, angle);
        let h = match self.kind {
            ParamKind::EuclideanArclength => self.h * s,
            ParamKind::SimilarityArclength => self.h,
        };
        let start = match self.kind {
            ParamKind::EuclideanArclength => self.start * s,
            ParamKind::SimilarityArclength => self.start,
        };
        Self::new(
            self.kind,
            h,
            start,
            self.points.iter().map(|p| m * p + b).collect(),
            self.closed,
        )
    }
}

fn det(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn require_kind(c: &PlaneCurveSamples, kind: ParamKind, what: &str) -> Result<()> {
    if c.kind != kind {
        return Err(Error::Domain(format!("{what} needs {kind:?} samples, got {:?}", c.kind)));
    }
    Ok(())
}

/// `kappa_E = det(gamma', gamma'')` of arclength samples.
pub fn euclidean_curvature(c: &PlaneCurveSamples) -> Result<Vec<f64>> {
    require_kind(c, ParamKind::EuclideanArclength, "euclidean curvature")?;
    let d1 = c.first();
    let d2 = c.second();
    // Dividing by |gamma'|^3 removes the leading stencil error in the speed.
    Ok(d1
        .iter()
        .zip(&d2)
        .map(|(&a, &b)| det(a, b) / a.norm().powi(3))
        .collect())
}

fn ensure_convex(kappa: &[f64]) -> Result<()> {
    for (index, &k) in kappa.iter().enumerate() {
        if !(k > 0.0) {
            return Err(Error::Inflection { index, kappa: k });
        }
    }
    Ok(())
}

/// Angle function `s = int kappa_E d sigma` by the cumulative trapezoid rule, `s(0) = 0`.
pub fn angle_parameter(c: &PlaneCurveSamples) -> Result<Vec<f64>> {
    let k = euclidean_curvature(c)?;
    ensure_convex(&k)?;
    let mut s = Vec::with_capacity(k.len());
    let mut acc = 0.0;
    s.push(0.0);
    for w in k.windows(2) {
        acc += 0.5 * c.h * (w[0] + w[1]);
        s.push(acc);
    }
    Ok(s)
}

/// Similarity curvature. For arclength samples `(kappa_E)_sigma / kappa_E^2`;
/// for similarity-arclength samples `-(log |gamma_s|)_s`, since `|gamma_s| = 1/kappa_E`.
pub fn similarity_curvature(c: &PlaneCurveSamples) -> Result<Vec<f64>> {
    match c.kind {
        ParamKind::EuclideanArclength => {
            let k = euclidean_curvature(c)?;
            ensure_convex(&k)?;
            let dk = stencil::first(&k, c.h, c.closed);
            Ok(dk.iter().zip(&k).map(|(d, k)| d / (k * k)).collect())
        }
        ParamKind::SimilarityArclength => {
            let d1 = c.first();
            let d2 = c.second();
            for (index, (&a, &b)) in d1.iter().zip(&d2).enumerate() {
                let k = det(a, b);
                if !(k > 0.0) {
                    return Err(Error::Inflection { index, kappa: k });
                }
            }
            let log_speed: Vec<f64> = d1.iter().map(|v| v.norm().ln()).collect();
            Ok(stencil::first(&log_speed, c.h, c.closed)
                .into_iter()
                .map(|v| -v)
                .collect())
        }
    }
}

/// Similarity Frenet frame `T = gamma_s`, `N = T_s + kappa_S T`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimFrame {
    pub t: Vec<Complex64>,
    pub n: Vec<Complex64>,
    pub h: f64,
    pub closed: bool,
}

pub fn sim_frame(c: &PlaneCurveSamples, u: &[f64]) -> Result<SimFrame> {
    require_kind(c, ParamKind::SimilarityArclength, "similarity frame")?;
    if u.len() != c.len() {
        return Err(Error::Domain(format!(
            "{} curvature samples for {} curve samples",
            u.len(),
            c.len()
        )));
    }
    let t = c.first();
    let ts = c.second();
    let n: Vec<Complex64> = ts.iter().zip(&t).zip(u).map(|((&a, &b), &k)| a + k * b).collect();
    for (index, (&a, &b)) in t.iter().zip(&n).enumerate() {
        if det(a, b).abs() <= 1e-12 * a.norm_sqr().max(b.norm_sqr()) {
            return Err(Error::DegenerateFrame { index });
        }
    }
    Ok(SimFrame {
        t,
        n,
        h: c.h,
        closed: c.closed,
    })
}

/// Max entry of `F^{-1} F_s - [[-u, -1], [1, -u]]` over samples away from open ends.
pub fn frenet_residual(frame: &SimFrame, u: &[f64]) -> Result<f64> {
    let m = frame.t.len();
    if u.len() != m || frame.n.len() != m {
        return Err(Error::Domain("frame and curvature lengths differ".into()));
    }
    let ts = stencil::first(&frame.t, frame.h, frame.closed);
    let ns = stencil::first(&frame.n, frame.h, frame.closed);
    let mut worst: f64 = 0.0;
    for k in nested_interior(m, frame.closed) {
        let (t, n) = (frame.t[k], frame.n[k]);
        let d = det(t, n);
        if d.abs() < 1e-300 {
            return Err(Error::DegenerateFrame { index: k });
        }
        // Coefficients of v in the basis (T, N) by Cramer's rule.
        let coords = |v: Complex64| (det(v, n) / d, det(t, v) / d);
        let (a11, a21) = coords(ts[k]);
        let (a12, a22) = coords(ns[k]);
        let mismatch = [a11 + u[k], a12 + 1.0, a21 - 1.0, a22 + u[k]];
        worst = mismatch.iter().fold(worst, |w, v| w.max(v.abs()));
    }
    Ok(worst)
}

/// Initial point and tangent for reconstruction; `N(0) = i T(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveStart {
    pub point: Complex64,
    pub tangent: Complex64,
}

impl Default for CurveStart {
    fn default() -> Self {
        Self {
            point: Complex64::new(0.0, 0.0),
            tangent: Complex64::new(1.0, 0.0),
        }
    }
}

/// Cubic Lagrange value of `u` at `k + 1/2`.
fn midpoint(u: &[f64], k: usize, periodic: bool) -> f64 {
    let n = u.len();
    let at = |i: isize| -> f64 {
        if periodic {
            u[i.rem_euclid(n as isize) as usize]
        } else {
            u[i.clamp(0, n as isize - 1) as usize]
        }
    };
    let k = k as isize;
    if periodic || (k >= 1 && k + 2 < n as isize) {
        (-at(k - 1) + 9.0 * at(k) + 9.0 * at(k + 1) - at(k + 2)) / 16.0
    } else if k == 0 {
        (5.0 * at(0) + 15.0 * at(1) - 5.0 * at(2) + at(3)) / 16.0
    } else {
        (5.0 * at(k + 1) + 15.0 * at(k) - 5.0 * at(k - 1) + at(k - 2)) / 16.0
    }
}

/// Integrates `T_s = -u T + N`, `N_s = -T - u N`, `gamma_s = T` by RK4.
///
/// A periodic `u` is integrated over one full period and the result has
/// `len(u) + 1` samples, so the closing gap is `last - first`.
pub fn reconstruct_curve(
    u: &[f64],
    ds: f64,
    periodic: bool,
    start: CurveStart,
) -> Result<PlaneCurveSamples> {
    if u.len() < 2 * BOUNDARY_COLLAR + 4 {
        return Err(Error::Domain("too few curvature samples".into()));
    }
    if start.tangent.norm() <= MIN_SPEED {
        return Err(Error::DegenerateFrame { index: 0 });
    }
    let steps = if periodic { u.len() } else { u.len() - 1 };
    let at = |k: usize| u[k % u.len()];
    let rhs = |k: f64, s: [Complex64; 3]| {
        let [_, t, n] = s;
        [t, -k * t + n, -t - k * n]
    };
    let axpy = |s: [Complex64; 3], d: [Complex64; 3], h: f64| {
        [s[0] + d[0] * h, s[1] + d[1] * h, s[2] + d[2] * h]
    };
    let mut state = [start.point, start.tangent, I * start.tangent];
    let mut pts = Vec::with_capacity(steps + 1);
    pts.push(state[0]);
    for k in 0..steps {
        let (u0, um, u1) = (at(k), midpoint(u, k, periodic), at(k + 1));
        let k1 = rhs(u0, state);
        let k2 = rhs(um, axpy(state, k1, 0.5 * ds));
        let k3 = rhs(um, axpy(state, k2, 0.5 * ds));
        let k4 = rhs(u1, axpy(state, k3, ds));
        for c in 0..3 {
            state[c] += (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]) * (ds / 6.0);
        }
        if !state.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Blowup { step: k + 1 });
        }
        pts.push(state[0]);
    }
    PlaneCurveSamples::new(ParamKind::SimilarityArclength, ds, 0.0, pts, false)
}

/// Similarity curvature samples on a uniform periodic grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimCurvatureState {
    pub u: Vec<f64>,
    pub t: f64,
    pub s_period: f64,
}

impl SimCurvatureState {
    pub fn new(u: Vec<f64>, s_period: f64) -> Result<Self> {
        if u.len() < 2 * BOUNDARY_COLLAR + 4 {
            return Err(Error::Domain("too few curvature samples".into()));
        }
        if !(s_period > 0.0 && s_period.is_finite()) {
            return Err(Error::Domain("period must be positive".into()));
        }
        if let Some(step) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite curvature at sample {step}")));
        }
        Ok(Self {
            u,
            t: 0.0,
            s_period,
        })
    }

    pub fn from_fn(n: usize, s_period: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let ds = s_period / n as f64;
        Self::new((0..n).map(|k| f(k as f64 * ds)).collect(), s_period)
    }

    pub fn ds(&self) -> f64 {
        self.s_period / self.u.len() as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        let ds = self.ds();
        (0..self.u.len()).map(|k| k as f64 * ds).collect()
    }

    /// Spatial mean of `u` (periodic rectangle rule).
    pub fn mean(&self) -> f64 {
        self.u.iter().sum::<f64>() / self.u.len() as f64
    }
}

/// Tangential speed `f` in the curve flow.
#[derive(Debug, Clone, PartialEq)]
pub enum Speed {
    Constant(f64),
    Samples(Vec<f64>),
}

/// `u_t = f_sss - 2u f_ss - (3u_s - u^2 - 1) f_s - (u_ss - 2u u_s) f + a u_s`.
pub fn evolution_rhs(state: &SimCurvatureState, f: &Speed, a: f64) -> Result<Vec<f64>> {
    rhs(&state.u, state.ds(), f, a)
}

fn rhs(u: &[f64], ds: f64, f: &Speed, a: f64) -> Result<Vec<f64>> {
    let us = stencil::first(u, ds, true);
    let uss = stencil::second(u, ds, true);
    let out = match f {
        Speed::Constant(f) => (0..u.len())
            .map(|k| -(uss[k] - 2.0 * u[k] * us[k]) * f + a * us[k])
            .collect(),
        Speed::Samples(fv) => {
            if fv.len() != u.len() {
                return Err(Error::Domain(format!(
                    "{} speed samples for {} curvature samples",
                    fv.len(),
                    u.len()
                )));
            }
            let fs = stencil::first(fv, ds, true);
            let fss = stencil::second(fv, ds, true);
            let fsss = stencil::first(&fss, ds, true);
            (0..u.len())
                .map(|k| {
                    fsss[k] - 2.0 * u[k] * fss[k] - (3.0 * us[k] - u[k] * u[k] - 1.0) * fs[k]
                        - (uss[k] - 2.0 * u[k] * us[k]) * fv[k]
                        + a * us[k]
                })
                .collect()
        }
    };
    Ok(out)
}

/// RK4 method of lines for the Burgers case `f = -1`, `a = 0`.
pub fn burgers_evolve(state: &SimCurvatureState, dt: f64, n_steps: usize) -> Result<SimCurvatureState> {
    let ds = state.ds();
    let limit = STABILITY_FACTOR * ds * ds;
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::StepSize { dt, limit });
    }
    let f = Speed::Constant(-1.0);
    let n = state.u.len();
    let mut u = state.u.clone();
    let mut tmp = vec![0.0; n];
    for step in 0..n_steps {
        let k1 = rhs(&u, ds, &f, 0.0)?;
        for i in 0..n {
            tmp[i] = u[i] + 0.5 * dt * k1[i];
        }
        let k2 = rhs(&tmp, ds, &f, 0.0)?;
        for i in 0..n {
            tmp[i] = u[i] + 0.5 * dt * k2[i];
        }
        let k3 = rhs(&tmp, ds, &f, 0.0)?;
        for i in 0..n {
            tmp[i] = u[i] + dt * k3[i];
        }
        let k4 = rhs(&tmp, ds, &f, 0.0)?;
        for i in 0..n {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if !u.iter().all(|v| v.is_finite()) {
            return Err(Error::Blowup { step: step + 1 });
        }
    }
    Ok(SimCurvatureState {
        u,
        t: state.t + dt * n_steps as f64,
        s_period: state.s_period,
    })
}

/// Evolves to `t_end` with the largest admissible uniform step.
pub fn burgers_evolve_to(state: &SimCurvatureState, t_end: f64) -> Result<SimCurvatureState> {
    let span = t_end - state.t;
    if span < 0.0 {
        return Err(Error::Domain("target time lies in the past".into()));
    }
    if span == 0.0 {
        return Ok(state.clone());
    }
    let limit = STABILITY_FACTOR * state.ds() * state.ds();
    let steps = (span / limit).ceil().max(1.0) as usize;
    burgers_evolve(state, span / steps as f64, steps)
}

/// Cole-Hopf solution `u = -phi_s/phi`, `phi = A + e^{-k^2 t} cos(k s)`, `A > 1`.
pub fn cole_hopf(s: f64, t: f64, k: f64, a: f64) -> f64 {
    let e = (-k * k * t).exp();
    k * e * (k * s).sin() / (a + e * (k * s).cos())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub t_end: f64,
    pub mean_initial: f64,
    pub mean_final: f64,
    pub frenet_residual_initial: f64,
    pub frenet_residual_final: f64,
    /// Measured similarity curvature of the reconstruction against the input, both times.
    pub roundtrip_initial: f64,
    pub roundtrip_final: f64,
}

fn reconstruction_check(u: &[f64], ds: f64) -> Result<(f64, f64)> {
    let curve = reconstruct_curve(u, ds, true, CurveStart::default())?;
    let mut uu = u.to_vec();
    uu.push(u[0]);
    let frame = sim_frame(&curve, &uu)?;
    let res = frenet_residual(&frame, &uu)?;
    let measured = similarity_curvature(&curve)?;
    let gap = curve
        .nested_interior()
        .map(|k| (measured[k] - uu[k]).abs())
        .fold(0.0, f64::max);
    Ok((res, gap))
}

/// Evolves `u0` to `t_end` and checks the reconstructed curves at both ends.
pub fn geometric_consistency(u0: &SimCurvatureState, t_end: f64) -> Result<ConsistencyReport> {
    let end = burgers_evolve_to(u0, t_end)?;
    let ds = u0.ds();
    let (r0, g0) = reconstruction_check(&u0.u, ds)?;
    let (r1, g1) = reconstruction_check(&end.u, ds)?;
    Ok(ConsistencyReport {
        t_end: end.t,
        mean_initial: u0.mean(),
        mean_final: end.mean(),
        frenet_residual_initial: r0,
        frenet_residual_final: r1,
        roundtrip_initial: g0,
        roundtrip_final: g1,
    })
}

#[cfg(test)]
mod tests;
