//! Rectangular charts in the complex coordinate plane and the finite difference
//! calculus (Wirtinger derivatives, Laplacians) every other module builds on.
//!
//! Interior nodes use centered 4th-order stencils. On open (non-periodic)
//! boundaries the two outermost nodes use 2nd-order stencils, so residual
//! comparisons skip a [`BOUNDARY_COLLAR`] of two nodes there.

use std::io::Write;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nodes excluded from residual reductions along each open boundary.
pub const BOUNDARY_COLLAR: usize = 2;

/// Smallest admissible node count per direction.
pub const MIN_NODES: usize = 8;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Rectangular grid of the coordinate `z = x + iy`.
///
/// Node `(i, j)` sits at `x_min + i dx + i (y_min + j dy)`. A periodic
/// direction does not repeat its first node at the end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConformalChart {
    pub x_min: f64,
    pub y_min: f64,
    pub dx: f64,
    pub dy: f64,
    pub nx: usize,
    pub ny: usize,
    pub periodic_x: bool,
    pub periodic_y: bool,
}

impl ConformalChart {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        x_min: f64,
        y_min: f64,
        dx: f64,
        dy: f64,
        nx: usize,
        ny: usize,
        periodic_x: bool,
        periodic_y: bool,
    ) -> Result<Self> {
        if !(dx > 0.0 && dy > 0.0) || !dx.is_finite() || !dy.is_finite() {
            return Err(Error::InvalidChart(format!(
                "spacings must be positive, got dx = {dx}, dy = {dy}"
            )));
        }
        if nx < MIN_NODES || ny < MIN_NODES {
            return Err(Error::InvalidChart(format!(
                "need at least {MIN_NODES} nodes per direction, got {nx} x {ny}"
            )));
        }
        if !x_min.is_finite() || !y_min.is_finite() {
            return Err(Error::InvalidChart("non-finite origin".into()));
        }
        Ok(Self {
            x_min,
            y_min,
            dx,
            dy,
            nx,
            ny,
            periodic_x,
            periodic_y,
        })
    }

    /// Chart covering `[x0, x1] x [y0, y1]`. In a periodic direction the upper
    /// end is the period boundary and is not sampled.
    pub fn spanning(
        x: (f64, f64),
        y: (f64, f64),
        nx: usize,
        ny: usize,
        periodic_x: bool,
        periodic_y: bool,
    ) -> Result<Self> {
        let spacing = |(a, b): (f64, f64), n: usize, periodic: bool| {
            let cells = if periodic { n } else { n.saturating_sub(1) };
            (b - a) / cells.max(1) as f64
        };
        Self::new(
            x.0,
            y.0,
            spacing(x, nx, periodic_x),
            spacing(y, ny, periodic_y),
            nx,
            ny,
            periodic_x,
            periodic_y,
        )
    }

    /// Same extent, different resolution.
    pub fn with_resolution(&self, nx: usize, ny: usize) -> Result<Self> {
        let (x1, y1) = self.upper_bounds();
        Self::spanning(
            (self.x_min, x1),
            (self.y_min, y1),
            nx,
            ny,
            self.periodic_x,
            self.periodic_y,
        )
    }

    /// Upper ends of the coordinate ranges (period boundary when periodic).
    pub fn upper_bounds(&self) -> (f64, f64) {
        let ex = if self.periodic_x { self.nx } else { self.nx - 1 };
        let ey = if self.periodic_y { self.ny } else { self.ny - 1 };
        (
            self.x_min + ex as f64 * self.dx,
            self.y_min + ey as f64 * self.dy,
        )
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn node(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.y_min + j as f64 * self.dy
    }

    #[inline]
    pub fn z(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.x(i), self.y(j))
    }

    /// Coordinates of linear node `k`.
    #[inline]
    pub fn point(&self, k: usize) -> (f64, f64) {
        let (i, j) = self.node(k);
        (self.x(i), self.y(j))
    }

    /// True when `(i, j)` lies at least `collar` nodes away from every open boundary.
    pub fn is_interior(&self, i: usize, j: usize, collar: usize) -> bool {
        let ok = |idx: usize, n: usize, periodic: bool| {
            periodic || (idx >= collar && idx + collar < n)
        };
        ok(i, self.nx, self.periodic_x) && ok(j, self.ny, self.periodic_y)
    }

    /// Linear indices of the nodes outside the boundary collar.
    pub fn interior_indices(&self, collar: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&k| {
                let (i, j) = self.node(k);
                self.is_interior(i, j, collar)
            })
            .collect()
    }

    /// Nodal quadrature weight: uniform in periodic directions, trapezoidal in open ones.
    pub fn quadrature_weight(&self, i: usize, j: usize) -> f64 {
        let w = |idx: usize, n: usize, periodic: bool, h: f64| {
            if !periodic && (idx == 0 || idx + 1 == n) {
                0.5 * h
            } else {
                h
            }
        };
        w(i, self.nx, self.periodic_x, self.dx) * w(j, self.ny, self.periodic_y, self.dy)
    }

    pub fn same_grid(&self, other: &ConformalChart) -> bool {
        self == other
    }

    pub fn ensure_same(&self, other: &ConformalChart, what: &str) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::ChartMismatch(what.to_string()))
        }
    }

    /// Smaller of the two node counts, used for resolution-scaled tolerances.
    pub fn resolution(&self) -> usize {
        self.nx.min(self.ny)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Real,
    Complex,
}

/// Complex samples, one per chart node, tagged real or complex.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    chart: ConformalChart,
    values: Vec<Complex64>,
    kind: FieldKind,
}

/// Relative imaginary-part allowance for real-kind fields.
pub const REAL_KIND_TOL: f64 = 1e-12;

impl ScalarField {
    pub fn from_values(chart: ConformalChart, kind: FieldKind, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != chart.len() {
            return Err(Error::ChartMismatch(format!(
                "{} values for a {}x{} chart",
                values.len(),
                chart.nx,
                chart.ny
            )));
        }
        let field = Self { chart, values, kind };
        if kind == FieldKind::Real {
            let limit = REAL_KIND_TOL * field.scale();
            let max_imag = field.max_imag();
            if max_imag > limit {
                return Err(Error::NotReal { max_imag, limit });
            }
        }
        Ok(field)
    }

    pub fn from_real(chart: ConformalChart, values: Vec<f64>) -> Result<Self> {
        Self::from_values(
            chart,
            FieldKind::Real,
            values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// Builds a complex field from a function of the node coordinate `z`.
    pub fn from_fn(chart: ConformalChart, f: impl Fn(Complex64) -> Complex64) -> Self {
        let values = (0..chart.len())
            .map(|k| {
                let (i, j) = chart.node(k);
                f(chart.z(i, j))
            })
            .collect();
        Self {
            chart,
            values,
            kind: FieldKind::Complex,
        }
    }

    pub fn real_from_fn(chart: ConformalChart, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..chart.len())
            .map(|k| {
                let (x, y) = chart.point(k);
                Complex64::new(f(x, y), 0.0)
            })
            .collect();
        Self {
            chart,
            values,
            kind: FieldKind::Real,
        }
    }

    pub fn constant(chart: ConformalChart, value: Complex64) -> Self {
        let kind = if value.im == 0.0 {
            FieldKind::Real
        } else {
            FieldKind::Complex
        };
        Self {
            chart,
            values: vec![value; chart.len()],
            kind,
        }
    }

    pub fn zeros(chart: ConformalChart) -> Self {
        Self::constant(chart, Complex64::new(0.0, 0.0))
    }

    pub fn chart(&self) -> &ConformalChart {
        &self.chart
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.chart.index(i, j)]
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Pointwise map; the result is complex-kind.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            chart: self.chart,
            values: self.values.iter().map(|&v| f(v)).collect(),
            kind: FieldKind::Complex,
        }
    }

    /// Pointwise map producing a real-kind field.
    pub fn map_real(&self, f: impl Fn(Complex64) -> f64) -> Self {
        Self {
            chart: self.chart,
            values: self
                .values
                .iter()
                .map(|&v| Complex64::new(f(v), 0.0))
                .collect(),
            kind: FieldKind::Real,
        }
    }

    /// Pointwise combination of two fields on the same chart.
    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.chart.ensure_same(&other.chart, "binary field operation")?;
        Ok(Self {
            chart: self.chart,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            kind: FieldKind::Complex,
        })
    }

    /// Re-tags the field as real, dropping imaginary parts after checking they vanish.
    pub fn into_real(self) -> Result<Self> {
        let limit = REAL_KIND_TOL * self.scale();
        let max_imag = self.max_imag();
        if max_imag > limit {
            return Err(Error::NotReal { max_imag, limit });
        }
        Ok(self.map_real(|v| v.re))
    }

    /// Takes the real part unconditionally.
    pub fn re(&self) -> Self {
        self.map_real(|v| v.re)
    }

    pub fn conj(&self) -> Self {
        let mut out = self.map(|v| v.conj());
        out.kind = self.kind;
        out
    }

    pub fn add(&self, other: &ScalarField) -> Result<Self> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &ScalarField) -> Result<Self> {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = self.map(|v| v * s);
        if s.im == 0.0 {
            out.kind = self.kind;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Field scale `max(1, max |f|)`, the reference for relative tolerances.
    pub fn scale(&self) -> f64 {
        self.max_abs().max(1.0)
    }

    /// Largest `|f - g|` over the given node subset (all nodes when `None`).
    pub fn max_abs_diff(&self, other: &ScalarField, nodes: Option<&[usize]>) -> Result<f64> {
        self.chart.ensure_same(&other.chart, "field comparison")?;
        let diff = |k: usize| (self.values[k] - other.values[k]).norm();
        Ok(match nodes {
            Some(ks) => ks.iter().map(|&k| diff(k)).fold(0.0, f64::max),
            None => (0..self.values.len()).map(diff).fold(0.0, f64::max),
        })
    }

    /// Nodal quadrature of the real part over the chart.
    pub fn integrate_real(&self) -> f64 {
        (0..self.values.len())
            .map(|k| {
                let (i, j) = self.chart.node(k);
                self.values[k].re * self.chart.quadrature_weight(i, j)
            })
            .sum()
    }

    /// Writes the `i,j,x,y,re,im` dump, rows ordered by `j` then `i`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["i", "j", "x", "y", "re", "im"])?;
        for j in 0..self.chart.ny {
            for i in 0..self.chart.nx {
                let v = self.at(i, j);
                w.write_record([
                    i.to_string(),
                    j.to_string(),
                    self.chart.x(i).to_string(),
                    self.chart.y(j).to_string(),
                    v.re.to_string(),
                    v.im.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// One-dimensional stencils on uniformly spaced samples. Shared by the surface
/// calculus and the plane-curve code.
pub mod stencil {
    use super::*;

    pub trait Sample: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}
    impl<T> Sample for T where T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

    /// First derivative of a line of samples.
    pub fn first<T: Sample>(f: &[T], h: f64, periodic: bool) -> Vec<T> {
        let n = f.len();
        let mut out = Vec::with_capacity(n);
        let c = 1.0 / (12.0 * h);
        if periodic {
            for i in 0..n {
                let at = |o: isize| f[(i as isize + o).rem_euclid(n as isize) as usize];
                out.push(((at(-2) - at(2)) + (at(1) - at(-1)) * 8.0) * c);
            }
            return out;
        }
        let h2 = 0.5 / h;
        for i in 0..n {
            let v = if i == 0 {
                (f[1] * 4.0 - f[0] * 3.0 - f[2]) * h2
            } else if i == n - 1 {
                (f[n - 1] * 3.0 - f[n - 2] * 4.0 + f[n - 3]) * h2
            } else if i == 1 || i == n - 2 {
                (f[i + 1] - f[i - 1]) * h2
            } else {
                ((f[i - 2] - f[i + 2]) + (f[i + 1] - f[i - 1]) * 8.0) * c
            };
            out.push(v);
        }
        out
    }

    /// Second derivative of a line of samples.
    pub fn second<T: Sample>(f: &[T], h: f64, periodic: bool) -> Vec<T> {
        let n = f.len();
        let mut out = Vec::with_capacity(n);
        let c = 1.0 / (12.0 * h * h);
        if periodic {
            for i in 0..n {
                let at = |o: isize| f[(i as isize + o).rem_euclid(n as isize) as usize];
                out.push(((at(-1) + at(1)) * 16.0 - (at(-2) + at(2)) - at(0) * 30.0) * c);
            }
            return out;
        }
        let ih2 = 1.0 / (h * h);
        for i in 0..n {
            let v = if i == 0 {
                (f[0] * 2.0 - f[1] * 5.0 + f[2] * 4.0 - f[3]) * ih2
            } else if i == n - 1 {
                (f[n - 1] * 2.0 - f[n - 2] * 5.0 + f[n - 3] * 4.0 - f[n - 4]) * ih2
            } else if i == 1 || i == n - 2 {
                (f[i - 1] + f[i + 1] - f[i] * 2.0) * ih2
            } else {
                ((f[i - 1] + f[i + 1]) * 16.0 - (f[i - 2] + f[i + 2]) - f[i] * 30.0) * c
            };
            out.push(v);
        }
        out
    }
}

/// Applies a 1D stencil along x (axis 0) or y (axis 1) of node-ordered samples.
pub(crate) fn along_axis<T: stencil::Sample>(
    chart: &ConformalChart,
    values: &[T],
    axis: usize,
    op: impl Fn(&[T], f64, bool) -> Vec<T>,
) -> Vec<T> {
    let mut out = values.to_vec();
    if axis == 0 {
        for j in 0..chart.ny {
            let row = &values[j * chart.nx..(j + 1) * chart.nx];
            let d = op(row, chart.dx, chart.periodic_x);
            out[j * chart.nx..(j + 1) * chart.nx].copy_from_slice(&d);
        }
    } else {
        let mut line = Vec::with_capacity(chart.ny);
        for i in 0..chart.nx {
            line.clear();
            line.extend((0..chart.ny).map(|j| values[chart.index(i, j)]));
            let d = op(&line, chart.dy, chart.periodic_y);
            for (j, v) in d.into_iter().enumerate() {
                out[chart.index(i, j)] = v;
            }
        }
    }
    out
}

fn derived(f: &ScalarField, values: Vec<Complex64>) -> ScalarField {
    ScalarField {
        chart: f.chart,
        values,
        kind: f.kind,
    }
}

pub fn d_x(f: &ScalarField) -> ScalarField {
    derived(f, along_axis(&f.chart, &f.values, 0, stencil::first))
}

pub fn d_y(f: &ScalarField) -> ScalarField {
    derived(f, along_axis(&f.chart, &f.values, 1, stencil::first))
}

pub fn d_xx(f: &ScalarField) -> ScalarField {
    derived(f, along_axis(&f.chart, &f.values, 0, stencil::second))
}

pub fn d_yy(f: &ScalarField) -> ScalarField {
    derived(f, along_axis(&f.chart, &f.values, 1, stencil::second))
}

pub fn d_xy(f: &ScalarField) -> ScalarField {
    d_y(&d_x(f))
}

fn combine(a: &ScalarField, b: &ScalarField, ca: Complex64, cb: Complex64) -> ScalarField {
    ScalarField {
        chart: a.chart,
        values: a
            .values
            .iter()
            .zip(&b.values)
            .map(|(&u, &v)| ca * u + cb * v)
            .collect(),
        kind: FieldKind::Complex,
    }
}

/// `d/dz = (d/dx - i d/dy) / 2`.
pub fn d_z(f: &ScalarField) -> ScalarField {
    combine(&d_x(f), &d_y(f), Complex64::new(0.5, 0.0), -0.5 * I)
}

/// `d/dzbar = (d/dx + i d/dy) / 2`.
pub fn d_zbar(f: &ScalarField) -> ScalarField {
    combine(&d_x(f), &d_y(f), Complex64::new(0.5, 0.0), 0.5 * I)
}

/// `d^2/dz^2 = (f_xx - f_yy - 2i f_xy) / 4`.
pub fn d_zz(f: &ScalarField) -> ScalarField {
    let diff = combine(&d_xx(f), &d_yy(f), Complex64::new(0.25, 0.0), Complex64::new(-0.25, 0.0));
    combine(&diff, &d_xy(f), Complex64::new(1.0, 0.0), -0.5 * I)
}

/// `d^2/dzbar^2 = (f_xx - f_yy + 2i f_xy) / 4`.
pub fn d_zbar_zbar(f: &ScalarField) -> ScalarField {
    let diff = combine(&d_xx(f), &d_yy(f), Complex64::new(0.25, 0.0), Complex64::new(-0.25, 0.0));
    combine(&diff, &d_xy(f), Complex64::new(1.0, 0.0), 0.5 * I)
}

/// `d^2/dz dzbar`, one quarter of the Laplacian.
pub fn d_z_zbar(f: &ScalarField) -> ScalarField {
    let mut out = combine(&d_xx(f), &d_yy(f), Complex64::new(0.25, 0.0), Complex64::new(0.25, 0.0));
    out.kind = f.kind;
    out
}

/// `f_xx + f_yy`, equal to `4 d_z d_zbar f`.
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let mut out = combine(&d_xx(f), &d_yy(f), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    out.kind = f.kind;
    out
}
