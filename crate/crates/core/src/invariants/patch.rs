//! Sampled immersions together with their derivative jets.

use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numgrid::{along_axis, stencil, ConformalChart, ScalarField};

pub type V3 = Vector3<f64>;

/// Position and partial derivatives of an immersion up to third order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    pub f: V3,
    pub fx: V3,
    pub fy: V3,
    pub fxx: V3,
    pub fxy: V3,
    pub fyy: V3,
    pub fxxx: V3,
    pub fxxy: V3,
    pub fxyy: V3,
    pub fyyy: V3,
}

impl Default for Jet3 {
    fn default() -> Self {
        let z = V3::zeros();
        Self {
            f: z,
            fx: z,
            fy: z,
            fxx: z,
            fxy: z,
            fyy: z,
            fxxx: z,
            fxxy: z,
            fxyy: z,
            fyyy: z,
        }
    }
}

impl Jet3 {
    /// Jet of `x -> s R x + b` composed with this one.
    pub fn transformed(&self, scale: f64, rotation: &Matrix3<f64>, shift: &V3) -> Self {
        let m = rotation * scale;
        Self {
            f: m * self.f + shift,
            fx: m * self.fx,
            fy: m * self.fy,
            fxx: m * self.fxx,
            fxy: m * self.fxy,
            fyy: m * self.fyy,
            fxxx: m * self.fxxx,
            fxxy: m * self.fxxy,
            fxyy: m * self.fxyy,
            fyyy: m * self.fyyy,
        }
    }
}

/// Closed-form metrical data an analytic immersion may supply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub omega: f64,
    pub mean: f64,
    pub gauss: f64,
    pub hopf: Complex64,
    pub calapso: f64,
}

/// An immersion with analytic derivative suppliers.
pub trait Immersion: Send + Sync {
    fn jet(&self, x: f64, y: f64) -> Jet3;

    fn closed_form(&self, _x: f64, _y: f64) -> Option<ClosedForm> {
        None
    }
}

impl<T: Immersion + ?Sized> Immersion for Arc<T> {
    fn jet(&self, x: f64, y: f64) -> Jet3 {
        (**self).jet(x, y)
    }

    fn closed_form(&self, x: f64, y: f64) -> Option<ClosedForm> {
        (**self).closed_form(x, y)
    }
}

/// `x -> s R x + b` applied to an analytic immersion.
pub struct Similarity<I> {
    pub inner: I,
    pub scale: f64,
    pub rotation: Matrix3<f64>,
    pub shift: V3,
}

impl<I: Immersion> Similarity<I> {
    pub fn new(inner: I, scale: f64, rotation: Matrix3<f64>, shift: V3) -> Result<Self> {
        let orthogonal = (rotation.transpose() * rotation - Matrix3::identity()).abs().max() < 1e-12;
        if !(scale > 0.0) || !orthogonal || rotation.determinant() < 0.0 {
            return Err(Error::Domain(
                "similarity needs a positive scale and a proper rotation".into(),
            ));
        }
        Ok(Self {
            inner,
            scale,
            rotation,
            shift,
        })
    }
}

impl<I: Immersion> Immersion for Similarity<I> {
    fn jet(&self, x: f64, y: f64) -> Jet3 {
        self.inner.jet(x, y).transformed(self.scale, &self.rotation, &self.shift)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeSource {
    Analytic,
    FiniteDifference,
}

/// An immersion sampled on a chart, carrying a derivative jet per node.
#[derive(Debug, Clone)]
pub struct SurfacePatch {
    chart: ConformalChart,
    jets: Vec<Jet3>,
    source: DerivativeSource,
}

impl SurfacePatch {
    /// Samples an analytic immersion, jets included.
    pub fn from_immersion(chart: ConformalChart, imm: &dyn Immersion) -> Self {
        let jets = (0..chart.len())
            .map(|k| {
                let (x, y) = chart.point(k);
                imm.jet(x, y)
            })
            .collect();
        Self {
            chart,
            jets,
            source: DerivativeSource::Analytic,
        }
    }

    /// Builds a patch from positions only; derivatives come from finite differences.
    pub fn from_positions(chart: ConformalChart, positions: Vec<V3>) -> Result<Self> {
        if positions.len() != chart.len() {
            return Err(Error::ChartMismatch(format!(
                "{} positions for {} nodes",
                positions.len(),
                chart.len()
            )));
        }
        let dx = |v: &[V3]| along_axis(&chart, v, 0, stencil::first);
        let dy = |v: &[V3]| along_axis(&chart, v, 1, stencil::first);
        let dxx = |v: &[V3]| along_axis(&chart, v, 0, stencil::second);
        let dyy = |v: &[V3]| along_axis(&chart, v, 1, stencil::second);
        let fx = dx(&positions);
        let fy = dy(&positions);
        let fxx = dxx(&positions);
        let fyy = dyy(&positions);
        let fxy = dy(&fx);
        let fxxx = dx(&fxx);
        let fxxy = dy(&fxx);
        let fxyy = dx(&fyy);
        let fyyy = dy(&fyy);
        let jets = (0..chart.len())
            .map(|k| Jet3 {
                f: positions[k],
                fx: fx[k],
                fy: fy[k],
                fxx: fxx[k],
                fxy: fxy[k],
                fyy: fyy[k],
                fxxx: fxxx[k],
                fxxy: fxxy[k],
                fxyy: fxyy[k],
                fyyy: fyyy[k],
            })
            .collect();
        Ok(Self {
            chart,
            jets,
            source: DerivativeSource::FiniteDifference,
        })
    }

    /// Builds a finite-difference patch from three component fields.
    pub fn from_components(components: [&ScalarField; 3]) -> Result<Self> {
        let chart = *components[0].chart();
        for c in &components[1..] {
            chart.ensure_same(c.chart(), "surface components")?;
        }
        let positions = (0..chart.len())
            .map(|k| {
                V3::new(
                    components[0].values()[k].re,
                    components[1].values()[k].re,
                    components[2].values()[k].re,
                )
            })
            .collect();
        Self::from_positions(chart, positions)
    }

    /// Applies a point map to the sampled positions and re-derives jets by finite differences.
    pub fn map_points(&self, f: impl Fn(V3) -> V3) -> Result<Self> {
        Self::from_positions(self.chart, self.jets.iter().map(|j| f(j.f)).collect())
    }

    pub fn chart(&self) -> &ConformalChart {
        &self.chart
    }

    pub fn jets(&self) -> &[Jet3] {
        &self.jets
    }

    pub fn source(&self) -> DerivativeSource {
        self.source
    }

    pub fn positions(&self) -> Vec<V3> {
        self.jets.iter().map(|j| j.f).collect()
    }

    /// The three real component fields of the immersion.
    pub fn components(&self) -> [ScalarField; 3] {
        let comp = |c: usize| {
            ScalarField::from_real(self.chart, self.jets.iter().map(|j| j.f[c]).collect())
                .expect("length matches chart")
        };
        [comp(0), comp(1), comp(2)]
    }
}

/// Inversion through the unit sphere, `x -> x / |x|^2`.
pub fn unit_sphere_inversion(x: V3) -> V3 {
    x / x.norm_squared()
}

/// Rotation about a unit axis, for similarity tests.
pub fn rotation(axis: V3, angle: f64) -> Matrix3<f64> {
    nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle).into_inner()
}
