//! The Hazzidakis equation for the mean curvature of Bonnet surfaces along
//! the isothermic line `s = z + zbar`,
//!
//! `((H_ss/H_s)_s - H_s) R^2 = 2 - H^2/H_s`, `H_s < 0`,
//!
//! with `R` one of three type coefficients, and the flatness diagnostics
//! built on it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integration stops once `H_s` rises above this.
pub const HS_LIMIT: f64 = -1e-8;
pub const R_LIMIT: f64 = 1e-8;
pub const HSSS_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BonnetType {
    A,
    B,
    C,
}

impl BonnetType {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Self::A),
            "B" | "b" => Ok(Self::B),
            "C" | "c" => Ok(Self::C),
            other => Err(Error::Parse(format!("unknown Bonnet type '{other}' (A, B, C)"))),
        }
    }

    /// Default validity window on the positive half-line; mirror with `s -> -s`.
    pub fn window(self) -> (f64, f64) {
        match self {
            BonnetType::A => (0.0, std::f64::consts::FRAC_PI_2),
            BonnetType::B | BonnetType::C => (0.0, f64::INFINITY),
        }
    }

    fn in_window(self, s: f64) -> bool {
        let (lo, hi) = self.window();
        let a = s.abs();
        a > lo && a < hi
    }
}

/// `R` and its first two derivatives.
pub fn r_derivatives(s: f64, kind: BonnetType) -> [f64; 3] {
    match kind {
        BonnetType::A => [0.5 * (2.0 * s).sin(), (2.0 * s).cos(), -2.0 * (2.0 * s).sin()],
        BonnetType::B => [0.5 * (2.0 * s).sinh(), (2.0 * s).cosh(), 2.0 * (2.0 * s).sinh()],
        BonnetType::C => [s, 1.0, 0.0],
    }
}

#[allow(non_snake_case)]
pub fn R_of_type(s: f64, kind: BonnetType) -> f64 {
    r_derivatives(s, kind)[0]
}

fn check_state(s: f64, h: f64, hs: f64, kind: BonnetType) -> Result<f64> {
    if !(hs < 0.0) {
        return Err(Error::Validity(format!("H_s = {hs:e} must be negative at s = {s}")));
    }
    if !h.is_finite() {
        return Err(Error::Validity(format!("H is not finite at s = {s}")));
    }
    let r = R_of_type(s, kind);
    if r == 0.0 || !r.is_finite() {
        return Err(Error::Validity(format!("R vanishes at s = {s}")));
    }
    Ok(r)
}

/// `H_sss` solved from the equation, which is linear in it.
pub fn hazzidakis_rhs(s: f64, h: f64, hs: f64, hss: f64, kind: BonnetType) -> Result<f64> {
    let r = check_state(s, h, hs, kind)?;
    Ok(hs * ((2.0 - h * h / hs) / (r * r) + hs) + hss * hss / hs)
}

/// Left minus right side of the equation.
pub fn equation_residual(s: f64, h: f64, hs: f64, hss: f64, hsss: f64, kind: BonnetType) -> f64 {
    let r = R_of_type(s, kind);
    let lhs = (hsss / hs - (hss / hs).powi(2) - hs) * r * r;
    lhs - (2.0 - h * h / hs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Completed,
    HsNotNegative,
    RVanishes,
    ThirdDerivativeBound,
    LeftWindow,
}

#[derive(Debug, Clone, Serialize)]
pub struct HazzidakisSolution {
    pub kind: BonnetType,
    pub step: f64,
    pub s: Vec<f64>,
    pub h: Vec<f64>,
    pub hs: Vec<f64>,
    pub hss: Vec<f64>,
    pub hsss: Vec<f64>,
    /// Moebius curvature at each node.
    pub kmobius: Vec<f64>,
    pub valid: Vec<bool>,
    pub stop: StopReason,
}

impl HazzidakisSolution {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Equation residual at every node from the stored derivatives.
    pub fn residuals(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| equation_residual(self.s[k], self.h[k], self.hs[k], self.hss[k], self.hsss[k], self.kind))
            .collect()
    }
}

fn mobius_curvature_of(hs: f64, hss: f64, hsss: f64) -> f64 {
    // (log|H_s|)_ss = H_sss/H_s - (H_ss/H_s)^2
    (hsss / hs - (hss / hs).powi(2)) / hs
}

/// Classic fixed-step RK4 on `(H, H_s, H_ss)`. A negative step integrates
/// backwards. The solution is truncated at the first event.
pub fn integrate(
    kind: BonnetType,
    s0: f64,
    initial: [f64; 3],
    s_end: f64,
    step: f64,
) -> Result<HazzidakisSolution> {
    if !(step.is_finite() && step != 0.0) {
        return Err(Error::Domain("step must be finite and nonzero".into()));
    }
    if (s_end - s0) * step < 0.0 {
        return Err(Error::Domain("step points away from s_end".into()));
    }
    if !kind.in_window(s0) {
        return Err(Error::Validity(format!("s0 = {s0} outside the validity window of type {kind:?}")));
    }
    let [h0, hs0, hss0] = initial;
    let hsss0 = hazzidakis_rhs(s0, h0, hs0, hss0, kind)?;
    let f = |s: f64, y: [f64; 3]| -> Option<[f64; 3]> {
        let d = hazzidakis_rhs(s, y[0], y[1], y[2], kind).ok()?;
        d.is_finite().then_some([y[1], y[2], d])
    };
    let axpy = |y: [f64; 3], a: f64, k: [f64; 3]| [y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2]];

    let n_steps = ((s_end - s0) / step).abs().round() as usize;
    let mut sol = HazzidakisSolution {
        kind,
        step,
        s: vec![s0],
        h: vec![h0],
        hs: vec![hs0],
        hss: vec![hss0],
        hsss: vec![hsss0],
        kmobius: vec![mobius_curvature_of(hs0, hss0, hsss0)],
        valid: vec![true],
        stop: StopReason::Completed,
    };
    let mut y = initial;
    let r_sign = R_of_type(s0, kind).signum();
    for n in 0..n_steps {
        let s = s0 + n as f64 * step;
        let s_next = s0 + (n + 1) as f64 * step;
        if !kind.in_window(s_next) {
            sol.stop = StopReason::LeftWindow;
            break;
        }
        let r_next = R_of_type(s_next, kind);
        if r_next.abs() <= R_LIMIT || r_next.signum() != r_sign {
            sol.stop = StopReason::RVanishes;
            break;
        }
        let stages = (|| {
            let k1 = f(s, y)?;
            let k2 = f(s + 0.5 * step, axpy(y, 0.5 * step, k1))?;
            let k3 = f(s + 0.5 * step, axpy(y, 0.5 * step, k2))?;
            let k4 = f(s + step, axpy(y, step, k3))?;
            Some([0, 1, 2].map(|i| y[i] + step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])))
        })();
        let Some(next) = stages else {
            sol.stop = StopReason::HsNotNegative;
            break;
        };
        if !(next[1] < HS_LIMIT) {
            sol.stop = StopReason::HsNotNegative;
            break;
        }
        let Ok(d3) = hazzidakis_rhs(s_next, next[0], next[1], next[2], kind) else {
            sol.stop = StopReason::HsNotNegative;
            break;
        };
        if !(d3.abs() <= HSSS_LIMIT) {
            sol.stop = StopReason::ThirdDerivativeBound;
            break;
        }
        y = next;
        sol.s.push(s_next);
        sol.h.push(y[0]);
        sol.hs.push(y[1]);
        sol.hss.push(y[2]);
        sol.hsss.push(d3);
        sol.kmobius.push(mobius_curvature_of(y[1], y[2], d3));
        sol.valid.push(true);
    }
    Ok(sol)
}

/// Moebius curvature `(1/H_s)(log |H_s|)_ss` along the solution.
pub fn mobius_curvature_along(sol: &HazzidakisSolution) -> Vec<f64> {
    sol.kmobius.clone()
}

/// `H = -2/(K_M s)` and its first three derivatives.
pub fn flat_bonnet_solution(kmobius: f64, s: f64) -> Result<[f64; 4]> {
    if !(kmobius < 0.0) {
        return Err(Error::Domain(format!("flat Bonnet surfaces need K_M < 0, got {kmobius}")));
    }
    if s == 0.0 || !s.is_finite() {
        return Err(Error::Domain("flat solution is singular at s = 0".into()));
    }
    let a = -2.0 / kmobius;
    Ok([a / s, -a / (s * s), 2.0 * a / s.powi(3), -6.0 * a / s.powi(4)])
}

/// `|Q| = 1/R^2`; `None` where `R` vanishes.
pub fn hopf_modulus_along(sol: &HazzidakisSolution) -> Vec<Option<f64>> {
    sol.s
        .iter()
        .map(|&s| {
            let r = R_of_type(s, sol.kind);
            (r.abs() > R_LIMIT).then(|| 1.0 / (r * r))
        })
        .collect()
}

/// Conformal factor along the line with `e^omega(s0) = e_omega0`. The
/// Codazzi relation with real `Q = -1/R^2` gives
/// `omega_s = R''/R' - 3R'/R - H_ss/H_s`, an exact derivative, so the
/// quadrature is evaluated in closed form. `None` where `R'` vanishes.
pub fn conformal_factor_along(sol: &HazzidakisSolution, e_omega0: f64) -> Vec<Option<f64>> {
    let Some(&s0) = sol.s.first() else {
        return Vec::new();
    };
    let [r0, rp0, _] = r_derivatives(s0, sol.kind);
    let hs0 = sol.hs[0];
    (0..sol.len())
        .map(|k| {
            let [r, rp, _] = r_derivatives(sol.s[k], sol.kind);
            let ratio = (rp / rp0) * (r0 / r).powi(3) * (hs0 / sol.hs[k]);
            (ratio > 0.0 && ratio.is_finite() && rp0 != 0.0).then(|| e_omega0 * ratio)
        })
        .collect()
}

/// `K/H^2 = 1 - 4|Q|^2 e^{-2 omega} / H^2` along the solution.
pub fn ratio_diagnostic(sol: &HazzidakisSolution, e_omega0: f64) -> Vec<Option<f64>> {
    let q = hopf_modulus_along(sol);
    let ew = conformal_factor_along(sol, e_omega0);
    (0..sol.len())
        .map(|k| {
            let (q, ew) = (q[k]?, ew[k]?);
            let h = sol.h[k];
            (h != 0.0).then(|| 1.0 - 4.0 * q * q / (ew * ew * h * h))
        })
        .collect()
}

/// Initial conformal factor under which the flat solution through `s0`
/// has vanishing Gauss curvature. The equation fixes `e^omega` only up to
/// this constant.
pub fn flat_conformal_factor(kmobius: f64, s0: f64) -> f64 {
    kmobius.abs() / s0.abs()
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    (m, var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlatVerdict {
    pub kmobius_mean: f64,
    pub kmobius_std: f64,
    pub kmobius_max_dev: f64,
    pub ratio_mean: f64,
    pub ratio_std: f64,
    /// Least-squares `a` in `H = a/s`.
    pub fitted_a: f64,
    /// Max relative deviation from the fit.
    pub fit_error: f64,
    pub nodes: usize,
    /// `K_M` constant within the tolerance relative to its mean.
    pub flat: bool,
}

/// Flatness test: `K_M` constant (max deviation within `tol |K_M|`).
pub fn flat_verdict(sol: &HazzidakisSolution, e_omega0: f64, tol: f64) -> FlatVerdict {
    let km: Vec<f64> = sol.kmobius.iter().copied().filter(|v| v.is_finite()).collect();
    let (km_m, km_s) = mean_std(&km);
    let km_dev = km.iter().map(|v| (v - km_m).abs()).fold(0.0, f64::max);
    let ratios: Vec<f64> = ratio_diagnostic(sol, e_omega0).into_iter().flatten().collect();
    let (r_m, r_s) = mean_std(&ratios);
    let (mut num, mut den) = (0.0, 0.0);
    for (s, h) in sol.s.iter().zip(&sol.h) {
        num += h / s;
        den += 1.0 / (s * s);
    }
    let a = num / den;
    let fit_error = sol
        .s
        .iter()
        .zip(&sol.h)
        .map(|(s, h)| ((h - a / s) / h).abs())
        .fold(0.0, f64::max);
    FlatVerdict {
        kmobius_mean: km_m,
        kmobius_std: km_s,
        kmobius_max_dev: km_dev,
        ratio_mean: r_m,
        ratio_std: r_s,
        fitted_a: a,
        fit_error,
        nodes: sol.len(),
        flat: km.len() >= 2 && km_dev <= tol * km_m.abs().max(f64::MIN_POSITIVE),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RandomControl {
    pub initial: [f64; 3],
    pub s0: f64,
    pub verdict: FlatVerdict,
    pub stop: StopReason,
}

/// Random initial data `(s0, H, H_s, H_ss)` with `H_s < 0`, each integrated
/// over a window of length `span` (clipped to the validity window).
pub fn random_controls(kind: BonnetType, count: usize, seed: u64, span: f64, step: f64, tol: f64) -> Vec<RandomControl> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = match kind {
        BonnetType::A => (0.1, 0.9),
        BonnetType::B | BonnetType::C => (0.5, 1.5),
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let s0 = rng.random_range(lo..hi);
        let initial = [rng.random_range(0.2..3.0), rng.random_range(-3.0..-0.2), rng.random_range(-4.0..4.0)];
        let (_, w_hi) = kind.window();
        let s_end = (s0 + span).min(w_hi - 1e-3);
        let Ok(sol) = integrate(kind, s0, initial, s_end, step) else {
            continue;
        };
        if sol.len() < 10 {
            continue;
        }
        out.push(RandomControl {
            initial,
            s0,
            verdict: flat_verdict(&sol, 1.0, tol),
            stop: sol.stop,
        });
    }
    out
}
