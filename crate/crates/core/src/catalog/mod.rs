//! Closed-form test surfaces and curves. Each entry carries analytic jets, its
//! known invariants where they exist, a recommended chart and the
//! classification flags the residual suite is expected to confirm.

mod taylor;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::{
    ClosedForm, ConformalData, ConformalDerivatives, Immersion, Jet3, SurfacePatch, V3,
};
use crate::numgrid::{ConformalChart, FieldKind, ScalarField};
use crate::simcurve::{ParamKind, PlaneCurveSamples};

use taylor::{jet_of, T3};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Expected classification of an entry.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub isothermic: bool,
    pub willmore: bool,
    pub minimal: bool,
    pub cmc: bool,
    pub himc: bool,
    pub bonnet: bool,
    pub flat: bool,
    pub umbilic: bool,
}

/// Recommended parameter rectangle of an entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChartDomain {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub periodic_x: bool,
    pub periodic_y: bool,
    /// Use an odd node count so the centre of the rectangle is a node.
    pub odd_nodes: bool,
}

impl ChartDomain {
    pub fn open(x: (f64, f64), y: (f64, f64)) -> Self {
        Self {
            x,
            y,
            periodic_x: false,
            periodic_y: false,
            odd_nodes: false,
        }
    }

    pub fn chart(&self, n: usize) -> Result<ConformalChart> {
        let n = if self.odd_nodes && n % 2 == 0 { n + 1 } else { n };
        ConformalChart::spanning(self.x, self.y, n, n, self.periodic_x, self.periodic_y)
    }
}

/// Point values of `(kappa, c)` and their derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalJet {
    pub kappa: Complex64,
    pub c: Complex64,
    pub kappa_z: Complex64,
    pub kappa_zbar: Complex64,
    pub kappa_zbar_zbar: Complex64,
    pub c_zbar: Complex64,
}

impl ConformalJet {
    fn constant(kappa: f64, c: f64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            kappa: kappa.into(),
            c: c.into(),
            kappa_z: zero,
            kappa_zbar: zero,
            kappa_zbar_zbar: zero,
            c_zbar: zero,
        }
    }
}

type HeightFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Source {
    Analytic(Arc<dyn Surface>),
    /// Height function of a Monge patch; jets by finite differences.
    Sampled(HeightFn),
}

/// Analytic catalog surface.
trait Surface: Immersion {
    fn conformal_jet(&self, _x: f64, _y: f64) -> Option<ConformalJet> {
        None
    }

    /// Holomorphic `h` with `1/H = h + conj(h)`.
    fn himc_potential(&self, _z: Complex64) -> Option<Complex64> {
        None
    }
}

#[derive(Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub domain: ChartDomain,
    pub flags: Flags,
    /// Set for non-conformal parametrizations (graphs); conformal-chart
    /// quantities are then only approximate.
    pub approximate: bool,
    source: Source,
}

impl std::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("domain", &self.domain)
            .field("flags", &self.flags)
            .field("approximate", &self.approximate)
            .finish()
    }
}

impl CatalogEntry {
    fn analytic(
        name: &str,
        params: &[(&str, f64)],
        domain: ChartDomain,
        flags: Flags,
        approximate: bool,
        s: impl Surface + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            domain,
            flags,
            approximate,
            source: Source::Analytic(Arc::new(s)),
        }
    }

    /// Recommended chart with `n` nodes per direction.
    pub fn chart(&self, n: usize) -> Result<ConformalChart> {
        self.domain.chart(n)
    }

    pub fn patch(&self, n: usize) -> Result<SurfacePatch> {
        self.patch_on(self.chart(n)?)
    }

    pub fn patch_on(&self, chart: ConformalChart) -> Result<SurfacePatch> {
        match &self.source {
            Source::Analytic(s) => Ok(SurfacePatch::from_immersion(chart, s.as_ref())),
            Source::Sampled(g) => {
                let pos = (0..chart.len())
                    .map(|k| {
                        let (x, y) = chart.point(k);
                        V3::new(x, y, g(x, y))
                    })
                    .collect();
                SurfacePatch::from_positions(chart, pos)
            }
        }
    }

    pub fn has_analytic_jets(&self) -> bool {
        matches!(self.source, Source::Analytic(_))
    }

    /// The analytic immersion, when there is one.
    pub fn immersion(&self) -> Option<Arc<dyn Immersion>> {
        match &self.source {
            Source::Analytic(s) => Some(Arc::new(ImmersionView(s.clone()))),
            Source::Sampled(_) => None,
        }
    }

    pub fn closed_form(&self, x: f64, y: f64) -> Option<ClosedForm> {
        match &self.source {
            Source::Analytic(s) => s.closed_form(x, y),
            Source::Sampled(_) => None,
        }
    }

    /// Closed-form fields `(omega, H, K, Q, h)` on a chart.
    pub fn closed_form_fields(&self, chart: &ConformalChart) -> Option<[ScalarField; 5]> {
        let cf: Option<Vec<ClosedForm>> = (0..chart.len())
            .map(|k| {
                let (x, y) = chart.point(k);
                self.closed_form(x, y)
            })
            .collect();
        let cf = cf?;
        let real = |f: &dyn Fn(&ClosedForm) -> f64| {
            ScalarField::from_real(*chart, cf.iter().map(f).collect()).expect("length matches chart")
        };
        Some([
            real(&|c| c.omega),
            real(&|c| c.mean),
            real(&|c| c.gauss),
            ScalarField::from_values(*chart, FieldKind::Complex, cf.iter().map(|c| c.hopf).collect())
                .expect("length matches chart"),
            real(&|c| c.calapso),
        ])
    }

    /// Closed-form `(kappa, c)` with exact derivatives attached.
    pub fn conformal_data(&self, chart: &ConformalChart) -> Option<ConformalData> {
        let Source::Analytic(s) = &self.source else {
            return None;
        };
        let jets: Option<Vec<ConformalJet>> = (0..chart.len())
            .map(|k| {
                let (x, y) = chart.point(k);
                s.conformal_jet(x, y)
            })
            .collect();
        let jets = jets?;
        let field = |f: &dyn Fn(&ConformalJet) -> Complex64| {
            ScalarField::from_values(*chart, FieldKind::Complex, jets.iter().map(f).collect())
                .expect("length matches chart")
        };
        let d = ConformalDerivatives {
            kappa_z: field(&|j| j.kappa_z),
            kappa_zbar: field(&|j| j.kappa_zbar),
            kappa_zbar_zbar: field(&|j| j.kappa_zbar_zbar),
            c_zbar: field(&|j| j.c_zbar),
        };
        ConformalData::new(field(&|j| j.kappa), field(&|j| j.c), None)
            .and_then(|cd| cd.with_derivatives(d))
            .ok()
    }

    /// Samples of the holomorphic HIMC potential `h`, `1/H = h + conj(h)`.
    pub fn himc_potential(&self, chart: &ConformalChart) -> Option<ScalarField> {
        let Source::Analytic(s) = &self.source else {
            return None;
        };
        let v: Option<Vec<Complex64>> = (0..chart.len())
            .map(|k| {
                let (x, y) = chart.point(k);
                s.himc_potential(Complex64::new(x, y))
            })
            .collect();
        ScalarField::from_values(*chart, FieldKind::Complex, v?).ok()
    }
}

struct ImmersionView(Arc<dyn Surface>);

impl Immersion for ImmersionView {
    fn jet(&self, x: f64, y: f64) -> Jet3 {
        self.0.jet(x, y)
    }

    fn closed_form(&self, x: f64, y: f64) -> Option<ClosedForm> {
        self.0.closed_form(x, y)
    }
}

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 7] = [
    "cylinder",
    "sphere",
    "enneper",
    "logspiral-cylinder",
    "plane",
    "saddle",
    "paraboloid",
];

/// Entry with default parameters.
pub fn by_name(name: &str) -> Result<CatalogEntry> {
    match name {
        "cylinder" => make_cylinder(1.0),
        "sphere" => make_round_sphere(1.0, false),
        "enneper" => Ok(make_enneper()),
        "logspiral-cylinder" => make_logspiral_cylinder(0.3, 1.0),
        "plane" => make_plane(1.0),
        "saddle" => Ok(make_saddle()),
        "paraboloid" => make_paraboloid(1.0),
        other => Err(Error::Domain(format!(
            "unknown catalog entry '{other}' (known: {})",
            NAMES.join(", ")
        ))),
    }
}

struct Cylinder {
    r: f64,
}

impl Immersion for Cylinder {
    fn jet(&self, x: f64, y: f64) -> Jet3 {
        let (xv, yv) = T3::vars(x, y);
        let a = yv.scale(1.0 / self.r);
        jet_of([a.cos() * self.r, a.sin() * self.r, xv])
    }

    fn closed_form(&self, _x: f64, _y: f64) -> Option<ClosedForm> {
        let h = 0.5 / self.r;
        Some(ClosedForm {
            omega: 0.0,
            mean: h,
            gauss: 0.0,
            hopf: Complex64::new(-0.25 / self.r, 0.0),
            calapso: h,
        })
    }
}

impl Surface for Cylinder {
    fn conformal_jet(&self, _x: f64, _y: f64) -> Option<ConformalJet> {
        Some(ConformalJet::constant(-0.25 / self.r, -0.25 / (self.r * self.r)))
    }

    fn himc_potential(&self, _z: Complex64) -> Option<Complex64> {
        Some(Complex64::new(self.r, 0.0))
    }
}

/// `F = (r cos(y/r), r sin(y/r), x)` over `[0,1] x [0, 2 pi r)`, periodic in `y`.
pub fn make_cylinder(r: f64) -> Result<CatalogEntry> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("cylinder radius must be positive, got {r}")));
    }
    Ok(CatalogEntry::analytic(
        "cylinder",
        &[("radius", r)],
        ChartDomain {
            x: (0.0, 1.0),
            y: (0.0, 2.0 * PI * r),
            periodic_x: false,
            periodic_y: true,
            odd_nodes: false,
        },
        Flags {
            isothermic: true,
            cmc: true,
            himc: true,
            bonnet: true,
            flat: true,
            ..Flags::default()
        },
        false,
        Cylinder { r },
    ))
}

struct Sphere {
    r: f64,
    outward: bool,
}

impl Immersion for Sphere {
    fn jet(&self, x: f64, y: f64) -> Jet3 {
        let (a, b) = T3::vars(x, y);
        // The outward orientation swaps the chart axes.
        let (xv, yv) = if self.outward { (b, a) } else { (a, b) };
        let g = (xv * xv + yv * yv + 1.0).recip();
        let r = self.r;
        jet_of([xv * g * (2.0 * r), yv * g * (2.0 * r), (g * -2.0 + 1.0) * r])
    }

    fn closed_form(&self, x: f64, y: f64) -> Option<ClosedForm> {
        let u = 1.0 + x * x + y * y;
        let mean = if self.outward { -1.0 } else { 1.0 } / self.r;
        Some(ClosedForm {
            omega: (4.0 * self.r * self.r / (u * u)).ln(),
            mean,
            gauss: 1.0 / (self.r * self.r),
            hopf: Complex64::new(0.0, 0.0),
            calapso: 0.0,
        })
    }
}

impl Surface for Sphere {
    fn conformal_jet(&self, _x: f64, _y: f64) -> Option<ConformalJet> {
        Some(ConformalJet::constant(0.0, 0.0))
    }
}

/// Inverse stereographic projection onto the sphere of radius `r`, chart
/// `[-1,1]^2`. The default normal points inward so that `H = 1/r`.
pub fn make_round_sphere(r: f64, outward: bool) -> Result<CatalogEntry> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("sphere radius must be positive, got {r}")));
    }
    Ok(CatalogEntry::analytic(
        "sphere",
        &[("radius", r), ("outward", if outward { 1.0 } else { 0.0 })],
        ChartDomain::open((-1.0, 1.0), (-1.0, 1.0)),
        Flags {
            isothermic: true,
            willmore: true,
            cmc: true,
            umbilic: true,
            ..Flags::default()
        },
        false,
        Sphere { r, outward },
    ))
}

struct Enneper;

impl Immersion for Enneper {
    fn jet(&self, x: f64, y: f64) -> Jet3 {
        let (x, y) = T3::vars(x, y);
        let x2 = x * x;
        let y2 = y * y;
        jet_of([
            x - x * x2.scale(1.0 / 3.0) + x * y2,
            -y - x2 * y + y * y2.scale(1.0 / 3.0),
            x2 - y2,
        ])
    }

    fn closed_form(&self, x: f64, y: f64) -> Option<ClosedForm> {
        let u = 1.0 + x * x + y * y;
        Some(ClosedForm {
            omega: 2.0 * u.ln(),
            mean: 0.0,
            gauss: -4.0 / u.powi(4),
            hopf: Complex64::new(-1.0, 0.0),
            calapso: 2.0 / (u * u),
        })
    }
}

impl Surface for Enneper {
    fn conformal_jet(&self, x: f64, y: f64) -> Option<ConformalJet> {
        let z = Complex64::new(x, y);
        let u = 1.0 + z.norm_sqr();
        Some(ConformalJet {
            kappa: Complex64::new(-1.0 / u, 0.0),
            c: -4.0 * z.conj() * z.conj() / (u * u),
            kappa_z: z.conj() / (u * u),
            kappa_zbar: z / (u * u),
            kappa_zbar_zbar: -2.0 * z * z / u.powi(3),
            c_zbar: -8.0 * z.conj() / u.powi(3),
        })
    }
}

/// `F = Re(z - z^3/3, i(z + z^3/3), z^2)` on `[-0.8, 0.8]^2`. In this chart
/// `Q = -1`, so `kappa = -1/(1+|z|^2)` is already real.
pub fn make_enneper() -> CatalogEntry {
    CatalogEntry::analytic(
        "enneper",
        &[],
        ChartDomain::open((-0.8, 0.8), (-0.8, 0.8)),
        Flags {
            isothermic: true,
            willmore: true,
            minimal: true,
            ..Flags::default()
        },
        false,
        Enneper,
    )
}

/// Arclength-parametrized log-spiral with `1/kappa_E = c2 - c1 sigma`.
#[derive(Debug, Clone, Copy)]
pub struct LogSpiral {
    pub c1: f64,
    pub c2: f64,
}

impl LogSpiral {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        if c1 == 0.0 || !c1.is_finite() {
            return Err(Error::Domain("log-spiral needs c1 != 0".into()));
        }
        if !(c2 > 0.0 && c2.is_finite()) {
            return Err(Error::Domain("log-spiral needs c2 > 0".into()));
        }
        Ok(Self { c1, c2 })
    }

    /// `c2 - c1 sigma`, positive on the admissible range.
    pub fn radius_of_curvature(&self, sigma: f64) -> f64 {
        self.c2 - self.c1 * sigma
    }

    /// Upper end of the admissible arclength range (curvature pole) for `c1 > 0`.
    pub fn sigma_limit(&self) -> f64 {
        if self.c1 > 0.0 {
            self.c2 / self.c1
        } else {
            f64::INFINITY
        }
    }

    pub fn curvature(&self, sigma: f64) -> f64 {
        1.0 / self.radius_of_curvature(sigma)
    }

    /// Position, unit tangent, and second and third derivatives.
    pub fn derivatives(&self, sigma: f64) -> [Complex64; 4] {
        let rho = self.radius_of_curvature(sigma);
        let k = 1.0 / rho;
        let dk = self.c1 * k * k;
        let t = (-I * (rho.ln() / self.c1)).exp();
        let g = -rho * t / (self.c1 - I);
        [g, t, I * k * t, (I * dk - k * k) * t]
    }

    /// Tangent angle, `-log(c2 - c1 sigma)/c1`.
    pub fn angle(&self, sigma: f64) -> f64 {
        -self.radius_of_curvature(sigma).ln() / self.c1
    }
}

struct LogSpiralCylinder {
    spiral: LogSpiral,
}

impl Immersion for LogSpiralCylinder {
    fn jet(&self, x: f64, y: f64) -> Jet3 {
        let [g, t, tt, ttt] = self.spiral.derivatives(y);
        let v = |c: Complex64| V3::new(c.re, c.im, 0.0);
        Jet3 {
            f: V3::new(g.re, g.im, x),
            fx: V3::new(0.0, 0.0, 1.0),
            fy: v(t),
            fyy: v(tt),
            fyyy: v(ttt),
            ..Jet3::default()
        }
    }

    fn closed_form(&self, _x: f64, y: f64) -> Option<ClosedForm> {
        let k = self.spiral.curvature(y);
        Some(ClosedForm {
            omega: 0.0,
            mean: 0.5 * k,
            gauss: 0.0,
            hopf: Complex64::new(-0.25 * k, 0.0),
            calapso: 0.5 * k,
        })
    }
}

impl Surface for LogSpiralCylinder {
    fn conformal_jet(&self, _x: f64, y: f64) -> Option<ConformalJet> {
        let c1 = self.spiral.c1;
        let k = self.spiral.curvature(y);
        let dk = c1 * k * k;
        let ddk = 2.0 * c1 * c1 * k * k * k;
        // For functions of y alone d_z = -(i/2) d_y and d_zbar = (i/2) d_y.
        Some(ConformalJet {
            kappa: Complex64::new(-0.25 * k, 0.0),
            c: Complex64::new(-0.25 * k * k, 0.0),
            kappa_z: I * dk / 8.0,
            kappa_zbar: -I * dk / 8.0,
            kappa_zbar_zbar: Complex64::new(ddk / 16.0, 0.0),
            c_zbar: -I * k * dk / 4.0,
        })
    }

    fn himc_potential(&self, z: Complex64) -> Option<Complex64> {
        Some(self.spiral.c2 + I * self.spiral.c1 * z)
    }
}

/// Cylinder `(gamma(y), x)` over an arclength log-spiral. The chart is
/// isometric to the plane (`omega = 0`) with `1/H = 2(c2 - c1 y)` harmonic.
pub fn make_logspiral_cylinder(c1: f64, c2: f64) -> Result<CatalogEntry> {
    let spiral = LogSpiral::new(c1, c2)?;
    let y1 = if c1 > 0.0 { (0.5 * c2 / c1).min(1.5) } else { 1.5 };
    Ok(CatalogEntry::analytic(
        "logspiral-cylinder",
        &[("c1", c1), ("c2", c2)],
        ChartDomain::open((0.0, 1.0), (0.0, y1)),
        Flags {
            isothermic: true,
            himc: true,
            bonnet: true,
            flat: true,
            ..Flags::default()
        },
        false,
        LogSpiralCylinder { spiral },
    ))
}

/// Monge patch `(x, y, g(x, y))` with an analytic height.
struct Graph<G: Fn(T3, T3) -> T3 + Send + Sync> {
    height: G,
    planar_scale: f64,
    closed: Option<fn(f64, f64, f64) -> ClosedForm>,
}

impl<G: Fn(T3, T3) -> T3 + Send + Sync> Immersion for Graph<G> {
    fn jet(&self, x: f64, y: f64) -> Jet3 {
        let (xv, yv) = T3::vars(x, y);
        let s = self.planar_scale;
        jet_of([xv * s, yv * s, (self.height)(xv, yv)])
    }

    fn closed_form(&self, x: f64, y: f64) -> Option<ClosedForm> {
        self.closed.map(|f| f(x, y, self.planar_scale))
    }
}

impl<G: Fn(T3, T3) -> T3 + Send + Sync> Surface for Graph<G> {}

/// The plane `(s x, s y, 0)`; `s = 2` is the dilated plane with `e^omega = 4`.
pub fn make_plane(scale: f64) -> Result<CatalogEntry> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Domain(format!("plane scale must be positive, got {scale}")));
    }
    Ok(CatalogEntry::analytic(
        "plane",
        &[("scale", scale)],
        ChartDomain::open((-1.0, 1.0), (-1.0, 1.0)),
        Flags {
            isothermic: true,
            willmore: true,
            minimal: true,
            umbilic: true,
            flat: true,
            ..Flags::default()
        },
        false,
        Graph {
            height: |_, _| T3::constant(0.0),
            planar_scale: scale,
            closed: Some(|_, _, s| ClosedForm {
                omega: (s * s).ln(),
                mean: 0.0,
                gauss: 0.0,
                hopf: Complex64::new(0.0, 0.0),
                calapso: 0.0,
            }),
        },
    ))
}

/// Graph of `xy` on `[-0.5, 0.5]^2`, a non-conformal negative control.
pub fn make_saddle() -> CatalogEntry {
    CatalogEntry::analytic(
        "saddle",
        &[],
        ChartDomain::open((-0.5, 0.5), (-0.5, 0.5)),
        Flags::default(),
        true,
        Graph {
            height: |x, y| x * y,
            planar_scale: 1.0,
            closed: None,
        },
    )
}

/// Graph of `a (x^2 + y^2)` on `[-0.5, 0.5]^2` with the apex on a node.
pub fn make_paraboloid(a: f64) -> Result<CatalogEntry> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::Domain("paraboloid needs a finite a != 0".into()));
    }
    let mut domain = ChartDomain::open((-0.5, 0.5), (-0.5, 0.5));
    domain.odd_nodes = true;
    Ok(CatalogEntry::analytic(
        "paraboloid",
        &[("a", a)],
        domain,
        Flags::default(),
        true,
        Graph {
            height: move |x, y| (x * x + y * y) * a,
            planar_scale: 1.0,
            closed: None,
        },
    ))
}

/// Monge patch of an arbitrary height function; jets by finite differences.
pub fn make_graph_surface(
    label: &str,
    height: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    domain: ChartDomain,
) -> CatalogEntry {
    CatalogEntry {
        name: format!("graph({label})"),
        params: BTreeMap::new(),
        domain,
        flags: Flags::default(),
        approximate: true,
        source: Source::Sampled(Arc::new(height)),
    }
}

/// Arclength samples of a log-spiral over `[0, sigma_end]`, `n` nodes.
pub fn make_logspiral_curve(c1: f64, c2: f64, sigma_end: f64, n: usize) -> Result<PlaneCurveSamples> {
    let spiral = LogSpiral::new(c1, c2)?;
    if !(sigma_end > 0.0 && sigma_end < spiral.sigma_limit()) {
        return Err(Error::Domain(format!(
            "log-spiral arclength range must stay below the curvature pole at {}",
            spiral.sigma_limit()
        )));
    }
    let h = sigma_end / (n.max(2) - 1) as f64;
    let pts = (0..n).map(|k| spiral.derivatives(k as f64 * h)[0]).collect();
    PlaneCurveSamples::new(ParamKind::EuclideanArclength, h, 0.0, pts, false)
}

/// Closed arclength samples of a circle of radius `r`, `n` nodes.
pub fn make_circle(r: f64, n: usize) -> Result<PlaneCurveSamples> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("circle radius must be positive, got {r}")));
    }
    let h = 2.0 * PI * r / n as f64;
    let pts = (0..n)
        .map(|k| r * Complex64::from_polar(1.0, k as f64 * h / r))
        .collect();
    PlaneCurveSamples::new(ParamKind::EuclideanArclength, h, 0.0, pts, true)
}

#[cfg(test)]
mod tests;
