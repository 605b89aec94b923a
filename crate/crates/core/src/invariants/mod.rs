//! The invariant ladder of a conformally parametrized surface in R^3:
//! metrical data `(omega, H, K, Q)`, similarity data (`K / H^2`, principal
//! directions) and Moebius data (`h`, `kappa`, `c`, Moebius metric and
//! curvature, Fubini forms).
//!
//! Orientation: the unit normal is `F_x x F_y` normalized. Flipping it negates
//! `H` and `Q` and leaves `|kappa|` alone.

mod patch;

pub use patch::{
    rotation, unit_sphere_inversion, ClosedForm, DerivativeSource, Immersion, Jet3, Similarity,
    SurfacePatch, V3,
};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numgrid::{self, ConformalChart, FieldKind, ScalarField, BOUNDARY_COLLAR};


/// Immersion threshold on `e^omega`.
pub const MIN_METRIC_FACTOR: f64 = 1e-10;
/// Conformality tolerance for patches with analytic jets.
pub const CONFORMALITY_TOL_ANALYTIC: f64 = 1e-6;
/// Conformality tolerance for finite-difference patches.
pub const CONFORMALITY_TOL_FD: f64 = 1e-3;
/// Relative umbilic threshold against the median Moebius factor.
pub const UMBILIC_RELATIVE: f64 = 1e-8;
/// Absolute umbilic floor, so totally umbilic patches mask completely.
pub const UMBILIC_FLOOR: f64 = 1e-20;
/// `|H|` below which `K / H^2` is undefined.
pub const MINIMAL_H: f64 = 1e-8;

/// Metric factor `E = e^omega = (|F_x|^2 + |F_y|^2)/2` and its derivatives up to second order.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FactorJet {
    pub e: f64,
    pub e_x: f64,
    pub e_y: f64,
    pub e_xx: f64,
    pub e_xy: f64,
    pub e_yy: f64,
}

impl FactorJet {
    /// Built from a jet of any vector type with the given inner product.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts<V>(d: [&V; 9], dot: impl Fn(&V, &V) -> f64) -> Self {
        let [fx, fy, fxx, fxy, fyy, fxxx, fxxy, fxyy, fyyy] = d;
        Self {
            e: 0.5 * (dot(fx, fx) + dot(fy, fy)),
            e_x: dot(fx, fxx) + dot(fy, fxy),
            e_y: dot(fx, fxy) + dot(fy, fyy),
            e_xx: dot(fxx, fxx) + dot(fx, fxxx) + dot(fxy, fxy) + dot(fy, fxxy),
            e_xy: dot(fxy, fxx) + dot(fx, fxxy) + dot(fyy, fxy) + dot(fy, fxyy),
            e_yy: dot(fxy, fxy) + dot(fx, fxyy) + dot(fyy, fyy) + dot(fy, fyyy),
        }
    }

    pub fn of_jet(j: &Jet3) -> Self {
        Self::from_parts(
            [&j.fx, &j.fy, &j.fxx, &j.fxy, &j.fyy, &j.fxxx, &j.fxxy, &j.fxyy, &j.fyyy],
            |a, b| a.dot(b),
        )
    }

    fn e_z(&self) -> Complex64 {
        Complex64::new(0.5 * self.e_x, -0.5 * self.e_y)
    }

    pub fn omega_z(&self) -> Complex64 {
        self.e_z() / self.e
    }

    pub fn omega_zz(&self) -> Complex64 {
        let e_zz = Complex64::new(0.25 * (self.e_xx - self.e_yy), -0.5 * self.e_xy);
        let wz = self.omega_z();
        e_zz / self.e - wz * wz
    }
}

/// Pointwise metrical geometry at one node.
#[derive(Debug, Clone, Copy)]
struct NodeGeometry {
    factor: FactorJet,
    conformality: f64,
    normal: V3,
    l: f64,
    m: f64,
    n: f64,
    mean: f64,
    gauss: f64,
    hopf: Complex64,
}

fn node_geometry(j: &Jet3) -> NodeGeometry {
    let factor = FactorJet::of_jet(j);
    let (e11, e12, e22) = (j.fx.dot(&j.fx), j.fx.dot(&j.fy), j.fy.dot(&j.fy));
    // <F_z, F_z> = (|F_x|^2 - |F_y|^2 - 2i F_x.F_y) / 4
    let fzfz = Complex64::new(0.25 * (e11 - e22), -0.5 * e12);
    let cross = j.fx.cross(&j.fy);
    let normal = cross / cross.norm();
    let (l, m, n) = (j.fxx.dot(&normal), j.fxy.dot(&normal), j.fyy.dot(&normal));
    let det = e11 * e22 - e12 * e12;
    NodeGeometry {
        factor,
        conformality: fzfz.norm() / factor.e,
        normal,
        l,
        m,
        n,
        mean: (e22 * l - 2.0 * e12 * m + e11 * n) / (2.0 * det),
        gauss: (l * n - m * m) / det,
        hopf: Complex64::new(0.25 * (l - n), -0.5 * m),
    }
}

fn check_immersed(chart: &ConformalChart, geo: &[NodeGeometry]) -> Result<()> {
    for (k, g) in geo.iter().enumerate() {
        if !(g.factor.e > MIN_METRIC_FACTOR) || !g.normal.iter().all(|v| v.is_finite()) {
            let (i, j) = chart.node(k);
            return Err(Error::SingularImmersion {
                i,
                j,
                factor: g.factor.e,
            });
        }
    }
    Ok(())
}

fn geometry(patch: &SurfacePatch) -> Result<Vec<NodeGeometry>> {
    let geo: Vec<NodeGeometry> = patch.jets().par_iter().map(node_geometry).collect();
    check_immersed(patch.chart(), &geo)?;
    Ok(geo)
}

fn real_field(chart: ConformalChart, v: impl Iterator<Item = f64>) -> ScalarField {
    ScalarField::from_real(chart, v.collect()).expect("length matches chart")
}

fn complex_field(chart: ConformalChart, v: impl Iterator<Item = Complex64>) -> ScalarField {
    ScalarField::from_values(chart, FieldKind::Complex, v.collect()).expect("length matches chart")
}

/// `omega` with `e^omega = 2 <F_z, F_zbar>`, plus `max |<F_z,F_z>| / e^omega`.
pub fn first_fundamental(patch: &SurfacePatch) -> Result<(ScalarField, f64)> {
    let geo = geometry(patch)?;
    let omega = real_field(*patch.chart(), geo.iter().map(|g| g.factor.e.ln()));
    let residual = geo.iter().map(|g| g.conformality).fold(0.0, f64::max);
    Ok((omega, residual))
}

pub fn unit_normal(patch: &SurfacePatch) -> Result<[ScalarField; 3]> {
    let geo = geometry(patch)?;
    let c = *patch.chart();
    Ok([0, 1, 2].map(|a| real_field(c, geo.iter().map(|g| g.normal[a]))))
}

/// Coefficients `(L, M, N) = (<F_xx,n>, <F_xy,n>, <F_yy,n>)`.
pub fn second_fundamental(patch: &SurfacePatch) -> Result<[ScalarField; 3]> {
    let geo = geometry(patch)?;
    let c = *patch.chart();
    Ok([
        real_field(c, geo.iter().map(|g| g.l)),
        real_field(c, geo.iter().map(|g| g.m)),
        real_field(c, geo.iter().map(|g| g.n)),
    ])
}

/// Mean and Gaussian curvature. For conformal charts these reduce to
/// `H = (L+N)/(2e^omega)` and `K = (LN - M^2)/e^{2omega}`.
pub fn mean_and_gauss(patch: &SurfacePatch) -> Result<(ScalarField, ScalarField)> {
    let geo = geometry(patch)?;
    let c = *patch.chart();
    Ok((
        real_field(c, geo.iter().map(|g| g.mean)),
        real_field(c, geo.iter().map(|g| g.gauss)),
    ))
}

/// `Q = <F_zz, n> = (L - N - 2iM)/4`.
pub fn hopf_coefficient(patch: &SurfacePatch) -> Result<ScalarField> {
    let geo = geometry(patch)?;
    Ok(complex_field(*patch.chart(), geo.iter().map(|g| g.hopf)))
}

/// `h = sqrt(H^2 - K)`, small negative round-off clipped to zero.
pub fn calapso_potential(mean: &ScalarField, gauss: &ScalarField) -> Result<ScalarField> {
    let chart = *mean.chart();
    chart.ensure_same(gauss.chart(), "calapso potential")?;
    let scale = mean
        .values()
        .iter()
        .map(|h| h.re * h.re)
        .fold(1.0, f64::max);
    let mut out = Vec::with_capacity(chart.len());
    for k in 0..chart.len() {
        let h = mean.values()[k].re;
        let d = h * h - gauss.values()[k].re;
        if d < -1e-6 * scale {
            let (i, j) = chart.node(k);
            return Err(Error::InconsistentCurvature { i, j, value: d });
        }
        out.push(d.max(0.0).sqrt());
    }
    ScalarField::from_real(chart, out)
}

/// `kappa = Q e^{-omega/2}`.
pub fn conformal_hopf(hopf: &ScalarField, omega: &ScalarField) -> Result<ScalarField> {
    hopf.zip_map(omega, |q, w| q * (-0.5 * w.re).exp())
}

/// `c = omega_zz - omega_z^2/2 + 2HQ` with stencil derivatives of `omega`.
pub fn schwarzian(omega: &ScalarField, mean: &ScalarField, hopf: &ScalarField) -> Result<ScalarField> {
    omega.chart().ensure_same(mean.chart(), "schwarzian")?;
    omega.chart().ensure_same(hopf.chart(), "schwarzian")?;
    let wz = numgrid::d_z(omega);
    let wzz = numgrid::d_zz(omega);
    let c = *omega.chart();
    Ok(complex_field(
        c,
        (0..c.len()).map(|k| {
            wzz.values()[k] - 0.5 * wz.values()[k] * wz.values()[k]
                + 2.0 * mean.values()[k].re * hopf.values()[k]
        }),
    ))
}

/// A field with a per-node validity mask; masked values are left at zero.
#[derive(Debug, Clone)]
pub struct MaskedField {
    pub field: ScalarField,
    pub mask: Vec<bool>,
}

impl MaskedField {
    pub fn masked_fraction(&self) -> f64 {
        self.mask.iter().filter(|&&m| m).count() as f64 / self.mask.len().max(1) as f64
    }

    /// Unmasked nodes outside the boundary collar.
    pub fn valid_interior(&self) -> Vec<usize> {
        self.field
            .chart()
            .interior_indices(BOUNDARY_COLLAR)
            .into_iter()
            .filter(|&k| !self.mask[k])
            .collect()
    }

    pub fn all_masked(&self) -> bool {
        self.mask.iter().all(|&m| m)
    }
}

/// Schwarzian derivative `(f_zz/f_z)_z - (f_zz/f_z)^2/2` of holomorphic samples.
/// Critical points (`|f_z| <= 1e-8`) are masked.
pub fn schwarzian_derivative_of_map(f: &ScalarField) -> MaskedField {
    let fz = numgrid::d_z(f);
    let fzz = numgrid::d_zz(f);
    let mask: Vec<bool> = fz.values().iter().map(|v| v.norm() <= 1e-8).collect();
    let ratio = complex_field(
        *f.chart(),
        (0..mask.len()).map(|k| {
            if mask[k] {
                Complex64::new(0.0, 0.0)
            } else {
                fzz.values()[k] / fz.values()[k]
            }
        }),
    );
    let dr = numgrid::d_z(&ratio);
    let values = (0..mask.len()).map(|k| {
        if mask[k] {
            Complex64::new(0.0, 0.0)
        } else {
            dr.values()[k] - 0.5 * ratio.values()[k] * ratio.values()[k]
        }
    });
    MaskedField {
        field: complex_field(*f.chart(), values),
        mask,
    }
}

/// Conformal factor `4|kappa|^2` of the Moebius metric.
pub fn mobius_metric(kappa: &ScalarField) -> ScalarField {
    kappa.map_real(|k| 4.0 * k.norm_sqr())
}

/// Conformal factor `h^2 e^omega` of the Moebius metric.
pub fn mobius_metric_metrical(calapso: &ScalarField, omega: &ScalarField) -> Result<ScalarField> {
    Ok(calapso.zip_map(omega, |h, w| Complex64::new(h.re * h.re * w.re.exp(), 0.0))?.re())
}

/// Umbilic mask of a Moebius factor: `lambda < max(1e-8 median, floor)`.
pub fn umbilic_mask(mobius_factor: &ScalarField) -> Vec<bool> {
    let mut sorted: Vec<f64> = mobius_factor.values().iter().map(|v| v.re).collect();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let threshold = (UMBILIC_RELATIVE * median).max(UMBILIC_FLOOR);
    mobius_factor.values().iter().map(|v| v.re < threshold).collect()
}

fn dilate(chart: &ConformalChart, mask: &[bool], radius: usize) -> Vec<bool> {
    let mut out = mask.to_vec();
    let r = radius as isize;
    for k in 0..mask.len() {
        if !mask[k] {
            continue;
        }
        let (i, j) = chart.node(k);
        for dj in -r..=r {
            for di in -r..=r {
                let wrap = |v: isize, n: usize, periodic: bool| -> Option<usize> {
                    if periodic {
                        Some(v.rem_euclid(n as isize) as usize)
                    } else if v >= 0 && (v as usize) < n {
                        Some(v as usize)
                    } else {
                        None
                    }
                };
                if let (Some(a), Some(b)) = (
                    wrap(i as isize + di, chart.nx, chart.periodic_x),
                    wrap(j as isize + dj, chart.ny, chart.periodic_y),
                ) {
                    out[chart.index(a, b)] = true;
                }
            }
        }
    }
    out
}

/// Gaussian curvature `-(2/lambda) d_z d_zbar log lambda` of `lambda dz dzbar`.
/// Umbilic nodes and their stencil neighbourhood are masked.
pub fn mobius_curvature(mobius_factor: &ScalarField) -> MaskedField {
    let chart = *mobius_factor.chart();
    let umbilic = umbilic_mask(mobius_factor);
    let log = real_field(
        chart,
        (0..chart.len()).map(|k| {
            if umbilic[k] {
                0.0
            } else {
                mobius_factor.values()[k].re.ln()
            }
        }),
    );
    let lap = numgrid::d_z_zbar(&log);
    let mask = dilate(&chart, &umbilic, 2);
    let values = (0..chart.len()).map(|k| {
        if mask[k] {
            0.0
        } else {
            -2.0 * lap.values()[k].re / mobius_factor.values()[k].re
        }
    });
    MaskedField {
        field: real_field(chart, values),
        mask,
    }
}

/// `integral (H^2 - K) e^omega dx dy` by nodal quadrature.
pub fn mobius_area(mean: &ScalarField, gauss: &ScalarField, omega: &ScalarField) -> Result<f64> {
    let chart = *mean.chart();
    chart.ensure_same(gauss.chart(), "mobius area")?;
    chart.ensure_same(omega.chart(), "mobius area")?;
    Ok((0..chart.len())
        .map(|k| {
            let (i, j) = chart.node(k);
            let h = mean.values()[k].re;
            (h * h - gauss.values()[k].re) * omega.values()[k].re.exp() * chart.quadrature_weight(i, j)
        })
        .sum())
}

/// Fubini's invariant forms in a conformal chart.
#[derive(Debug, Clone)]
pub struct FubiniForms {
    /// `h^2 e^omega`, the Moebius metric factor.
    pub metric_factor: ScalarField,
    pub ii_xx: ScalarField,
    pub ii_xy: ScalarField,
    pub ii_yy: ScalarField,
}

impl FubiniForms {
    /// `e^{-omega}(II_xx + II_yy)`, identically zero for a trace-free form.
    pub fn trace(&self, omega: &ScalarField) -> Result<ScalarField> {
        let s = self.ii_xx.add(&self.ii_yy)?;
        Ok(s.zip_map(omega, |t, w| t * (-w.re).exp())?.re())
    }
}

/// `I_M = h^2 I` and `II_M = h (II - H I)` for `I = e^omega (dx^2 + dy^2)`.
pub fn fubini_forms(
    calapso: &ScalarField,
    omega: &ScalarField,
    second: &[ScalarField; 3],
    mean: &ScalarField,
) -> Result<FubiniForms> {
    let chart = *calapso.chart();
    for f in [omega, &second[0], &second[1], &second[2], mean] {
        chart.ensure_same(f.chart(), "fubini forms")?;
    }
    let at = |f: &ScalarField, k: usize| f.values()[k].re;
    let comp = |which: usize| {
        real_field(
            chart,
            (0..chart.len()).map(|k| {
                let h = at(calapso, k);
                let e = at(omega, k).exp();
                let metric = if which == 1 { 0.0 } else { e };
                h * (at(&second[which], k) - at(mean, k) * metric)
            }),
        )
    };
    Ok(FubiniForms {
        metric_factor: mobius_metric_metrical(calapso, omega)?,
        ii_xx: comp(0),
        ii_xy: comp(1),
        ii_yy: comp(2),
    })
}

/// `K / H^2`, masked where `|H| <= 1e-8`.
pub fn similarity_ratio(mean: &ScalarField, gauss: &ScalarField) -> Result<MaskedField> {
    let chart = *mean.chart();
    chart.ensure_same(gauss.chart(), "similarity ratio")?;
    let mask: Vec<bool> = mean.values().iter().map(|h| h.re.abs() <= MINIMAL_H).collect();
    let values = (0..chart.len()).map(|k| {
        if mask[k] {
            0.0
        } else {
            let h = mean.values()[k].re;
            gauss.values()[k].re / (h * h)
        }
    });
    Ok(MaskedField {
        field: real_field(chart, values),
        mask,
    })
}

/// Chart angle of the first principal direction, `-arg(Q)/2`, in `(-pi/2, pi/2]`.
pub fn principal_angle(hopf: &ScalarField) -> ScalarField {
    hopf.map_real(|q| -0.5 * q.arg())
}

/// All invariants of a patch, computed once.
#[derive(Debug, Clone)]
pub struct SurfaceInvariants {
    pub chart: ConformalChart,
    pub omega: ScalarField,
    pub conformality_residual: f64,
    pub normal: [ScalarField; 3],
    pub second: [ScalarField; 3],
    pub mean: ScalarField,
    pub gauss: ScalarField,
    pub hopf: ScalarField,
    pub calapso: ScalarField,
    pub kappa: ScalarField,
    /// Schwarzian from the jet (`omega` derivatives from third-order data).
    pub schwarzian: ScalarField,
    /// `4|kappa|^2`.
    pub mobius_factor: ScalarField,
    pub umbilic: Vec<bool>,
}

impl SurfaceInvariants {
    pub fn compute(patch: &SurfacePatch) -> Result<Self> {
        let chart = *patch.chart();
        let geo = geometry(patch)?;
        let omega = real_field(chart, geo.iter().map(|g| g.factor.e.ln()));
        let conformality_residual = geo.iter().map(|g| g.conformality).fold(0.0, f64::max);
        let normal = [0, 1, 2].map(|a| real_field(chart, geo.iter().map(|g| g.normal[a])));
        let second = [
            real_field(chart, geo.iter().map(|g| g.l)),
            real_field(chart, geo.iter().map(|g| g.m)),
            real_field(chart, geo.iter().map(|g| g.n)),
        ];
        let mean = real_field(chart, geo.iter().map(|g| g.mean));
        let gauss = real_field(chart, geo.iter().map(|g| g.gauss));
        let hopf = complex_field(chart, geo.iter().map(|g| g.hopf));
        let calapso = calapso_potential(&mean, &gauss)?;
        let kappa = conformal_hopf(&hopf, &omega)?;
        let schwarzian = complex_field(
            chart,
            geo.iter().map(|g| {
                let wz = g.factor.omega_z();
                g.factor.omega_zz() - 0.5 * wz * wz + 2.0 * g.mean * g.hopf
            }),
        );
        let mobius_factor = mobius_metric(&kappa);
        let umbilic = umbilic_mask(&mobius_factor);
        Ok(Self {
            chart,
            omega,
            conformality_residual,
            normal,
            second,
            mean,
            gauss,
            hopf,
            calapso,
            kappa,
            schwarzian,
            mobius_factor,
            umbilic,
        })
    }

    pub fn metrical_data(&self) -> MetricalData {
        MetricalData {
            omega: self.omega.clone(),
            mean: self.mean.clone(),
            hopf: self.hopf.clone(),
        }
    }

    pub fn conformal_data(&self) -> ConformalData {
        ConformalData {
            kappa: self.kappa.clone(),
            schwarzian: self.schwarzian.clone(),
            q: None,
            derivatives: None,
        }
    }

    pub fn mobius_area(&self) -> f64 {
        mobius_area(&self.mean, &self.gauss, &self.omega).expect("fields share the chart")
    }

    pub fn mobius_factor_metrical(&self) -> ScalarField {
        mobius_metric_metrical(&self.calapso, &self.omega).expect("fields share the chart")
    }

    pub fn mobius_curvature(&self) -> MaskedField {
        mobius_curvature(&self.mobius_factor)
    }

    pub fn similarity_ratio(&self) -> MaskedField {
        similarity_ratio(&self.mean, &self.gauss).expect("fields share the chart")
    }

    pub fn fubini_forms(&self) -> FubiniForms {
        fubini_forms(&self.calapso, &self.omega, &self.second, &self.mean)
            .expect("fields share the chart")
    }

    /// Umbilic mask as a masked view of the Moebius factor.
    pub fn masked_mobius_factor(&self) -> MaskedField {
        MaskedField {
            field: self.mobius_factor.clone(),
            mask: self.umbilic.clone(),
        }
    }

    /// Unmasked nodes outside the boundary collar.
    pub fn valid_interior(&self) -> Vec<usize> {
        self.masked_mobius_factor().valid_interior()
    }
}

/// The metrical triple `(omega, H, Q)`, the state deformed by the Bonnet/HIMC families.
#[derive(Debug, Clone)]
pub struct MetricalData {
    pub omega: ScalarField,
    pub mean: ScalarField,
    pub hopf: ScalarField,
}

impl MetricalData {
    pub fn new(omega: ScalarField, mean: ScalarField, hopf: ScalarField) -> Result<Self> {
        omega.chart().ensure_same(mean.chart(), "metrical data")?;
        omega.chart().ensure_same(hopf.chart(), "metrical data")?;
        Ok(Self {
            omega: omega.into_real()?,
            mean: mean.into_real()?,
            hopf,
        })
    }

    pub fn chart(&self) -> &ConformalChart {
        self.omega.chart()
    }

    /// `K = H^2 - 4|Q|^2 e^{-2 omega}`, the Gauss equation solved algebraically.
    pub fn gauss_curvature(&self) -> ScalarField {
        let c = *self.chart();
        real_field(
            c,
            (0..c.len()).map(|k| {
                let h = self.mean.values()[k].re;
                let w = self.omega.values()[k].re;
                h * h - 4.0 * self.hopf.values()[k].norm_sqr() * (-2.0 * w).exp()
            }),
        )
    }

    /// Intrinsic curvature `-2 e^{-omega} omega_zzbar` of `e^omega dz dzbar`.
    pub fn intrinsic_curvature(&self) -> ScalarField {
        let lap = numgrid::d_z_zbar(&self.omega);
        lap.zip_map(&self.omega, |l, w| -2.0 * l * (-w.re).exp())
            .expect("same chart")
            .re()
    }

    /// Moebius factor `(H^2 - K) e^omega = 4|Q|^2 e^{-omega}`.
    pub fn mobius_factor(&self) -> ScalarField {
        self.hopf
            .zip_map(&self.omega, |q, w| Complex64::new(4.0 * q.norm_sqr() * (-w.re).exp(), 0.0))
            .expect("same chart")
            .re()
    }

    pub fn kappa(&self) -> ScalarField {
        conformal_hopf(&self.hopf, &self.omega).expect("same chart")
    }

    /// `K / H^2` with `K` from the algebraic Gauss equation.
    pub fn similarity_ratio(&self) -> MaskedField {
        similarity_ratio(&self.mean, &self.gauss_curvature()).expect("same chart")
    }
}

/// Conformal data `(kappa, c)` and an optional holomorphic quadratic differential `q`.
///
/// When the data come from closed forms, `derivatives` carries the exact
/// derivatives the residuals need and stencils are bypassed.
#[derive(Debug, Clone)]
pub struct ConformalData {
    pub kappa: ScalarField,
    pub schwarzian: ScalarField,
    pub q: Option<ScalarField>,
    pub derivatives: Option<ConformalDerivatives>,
}

/// Exact derivatives of `(kappa, c)`.
#[derive(Debug, Clone)]
pub struct ConformalDerivatives {
    pub kappa_z: ScalarField,
    pub kappa_zbar: ScalarField,
    pub kappa_zbar_zbar: ScalarField,
    pub c_zbar: ScalarField,
}

impl ConformalDerivatives {
    /// Derivatives of `(l kappa, c)` for a constant `l`.
    pub fn with_kappa_scaled(&self, l: Complex64) -> Self {
        Self {
            kappa_z: self.kappa_z.scaled(l),
            kappa_zbar: self.kappa_zbar.scaled(l),
            kappa_zbar_zbar: self.kappa_zbar_zbar.scaled(l),
            c_zbar: self.c_zbar.clone(),
        }
    }
}

impl ConformalData {
    pub fn new(kappa: ScalarField, schwarzian: ScalarField, q: Option<ScalarField>) -> Result<Self> {
        kappa.chart().ensure_same(schwarzian.chart(), "conformal data")?;
        if let Some(q) = &q {
            kappa.chart().ensure_same(q.chart(), "conformal data")?;
        }
        Ok(Self {
            kappa,
            schwarzian,
            q,
            derivatives: None,
        })
    }

    pub fn chart(&self) -> &ConformalChart {
        self.kappa.chart()
    }

    pub fn with_q(mut self, q: ScalarField) -> Result<Self> {
        self.kappa.chart().ensure_same(q.chart(), "conformal data")?;
        self.q = Some(q);
        Ok(self)
    }

    pub fn with_derivatives(mut self, d: ConformalDerivatives) -> Result<Self> {
        for f in [&d.kappa_z, &d.kappa_zbar, &d.kappa_zbar_zbar, &d.c_zbar] {
            self.kappa.chart().ensure_same(f.chart(), "conformal derivatives")?;
        }
        self.derivatives = Some(d);
        Ok(self)
    }

    /// `q`, or the zero field when absent.
    pub fn q_or_zero(&self) -> ScalarField {
        self.q
            .clone()
            .unwrap_or_else(|| ScalarField::zeros(*self.chart()))
    }
}

#[cfg(test)]
mod tests;
