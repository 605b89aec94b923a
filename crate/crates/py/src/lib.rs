//! Python bindings for `mlab_core`.

use mlab_core::catalog::{self, CatalogEntry};
use mlab_core::deform;
use mlab_core::hazzidakis::{self, BonnetType};
use mlab_core::invariants::{ConformalData, SurfaceInvariants};
use mlab_core::residuals::{self, ResidualReport};
use mlab_core::selftest::{self, SelftestConfig, CRITERIA};
use mlab_core::simcurve::{self, CurveStart, ParamKind, PlaneCurveSamples, SimCurvatureState};
use mlab_core::{Error, ErrorCategory, FieldKind, ScalarField, TolProfile, Tolerances};
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn py_err(e: Error) -> PyErr {
    match e.category() {
        ErrorCategory::Domain => PyValueError::new_err(e.to_string()),
        ErrorCategory::Numerical => PyArithmeticError::new_err(e.to_string()),
        ErrorCategory::Io => PyOSError::new_err(e.to_string()),
    }
}

/// Converts through JSON so nested reports arrive as plain dicts and lists.
fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn tolerances(profile: &str) -> PyResult<Tolerances> {
    Ok(Tolerances::new(TolProfile::parse(profile).map_err(py_err)?))
}

/// A complex or real field on a rectangular chart, stored row-major in `x`.
#[pyclass(name = "Field", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyField(ScalarField);

#[pymethods]
impl PyField {
    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.0.chart().nx, self.0.chart().ny)
    }

    #[getter]
    fn is_real(&self) -> bool {
        self.0.kind() == FieldKind::Real
    }

    fn values(&self) -> Vec<Complex64> {
        self.0.values().to_vec()
    }

    fn real(&self) -> Vec<f64> {
        self.0.real_parts()
    }

    /// Chart coordinates of every node, in storage order.
    fn points(&self) -> Vec<(f64, f64)> {
        let c = self.0.chart();
        (0..c.len()).map(|k| c.point(k)).collect()
    }

    fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    fn __len__(&self) -> usize {
        self.0.values().len()
    }

    fn __repr__(&self) -> String {
        let (nx, ny) = self.shape();
        format!("Field({nx}x{ny}, max_abs={:.6e})", self.0.max_abs())
    }
}

#[pyclass(name = "Surface", frozen)]
pub struct PySurface(CatalogEntry);

#[pymethods]
impl PySurface {
    #[staticmethod]
    fn names() -> Vec<&'static str> {
        catalog::NAMES.to_vec()
    }

    #[staticmethod]
    fn catalog(name: &str) -> PyResult<Self> {
        catalog::by_name(name).map(Self).map_err(py_err)
    }

    #[getter]
    fn name(&self) -> &str {
        &self.0.name
    }

    #[getter]
    fn approximate(&self) -> bool {
        self.0.approximate
    }

    #[getter]
    fn flags<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.flags)
    }

    #[pyo3(signature = (n=64))]
    fn invariants(&self, n: usize) -> PyResult<PyInvariants> {
        let patch = self.0.patch(n).map_err(py_err)?;
        let inv = SurfaceInvariants::compute(&patch).map_err(py_err)?;
        Ok(PyInvariants { entry: self.0.clone(), inv })
    }

    fn __repr__(&self) -> String {
        format!("Surface('{}')", self.0.name)
    }
}

#[pyclass(name = "Invariants", frozen)]
pub struct PyInvariants {
    entry: CatalogEntry,
    inv: SurfaceInvariants,
}

impl PyInvariants {
    fn conformal(&self) -> ConformalData {
        self.entry
            .conformal_data(&self.inv.chart)
            .unwrap_or_else(|| self.inv.conformal_data())
    }
}

#[pymethods]
impl PyInvariants {
    #[getter]
    fn omega(&self) -> PyField {
        PyField(self.inv.omega.clone())
    }

    #[getter]
    fn mean(&self) -> PyField {
        PyField(self.inv.mean.clone())
    }

    #[getter]
    fn gauss(&self) -> PyField {
        PyField(self.inv.gauss.clone())
    }

    #[getter]
    fn hopf(&self) -> PyField {
        PyField(self.inv.hopf.clone())
    }

    #[getter]
    fn kappa(&self) -> PyField {
        PyField(self.inv.kappa.clone())
    }

    #[getter]
    fn schwarzian(&self) -> PyField {
        PyField(self.inv.schwarzian.clone())
    }

    #[getter]
    fn mobius_factor(&self) -> PyField {
        PyField(self.inv.mobius_factor.clone())
    }

    #[getter]
    fn mobius_area(&self) -> f64 {
        self.inv.mobius_area()
    }

    #[getter]
    fn conformality_residual(&self) -> f64 {
        self.inv.conformality_residual
    }

    /// Integrability and classification residuals. Without `q` the constrained
    /// Willmore check uses the least-squares constant.
    #[pyo3(signature = (profile="default", q=None))]
    fn residuals<'py>(&self, py: Python<'py>, profile: &str, q: Option<Complex64>) -> PyResult<Bound<'py, PyAny>> {
        let tols = tolerances(profile)?;
        let md = self.inv.metrical_data();
        let cd = self.conformal();
        let q = q.unwrap_or_else(|| residuals::fit_constant_q(&cd));
        let mut out: Vec<ResidualReport> = residuals::gauss_codazzi(&md, &tols).into();
        out.extend(residuals::conformal_gauss_codazzi(&cd, &tols));
        out.push(residuals::isothermic_form_residual(&cd, &tols));
        out.push(residuals::willmore_residual(&cd, &tols));
        let cq = cd
            .with_q(ScalarField::constant(self.inv.chart, q))
            .map_err(py_err)?;
        out.push(residuals::constrained_willmore_residual(&cq, &tols));
        out.push(residuals::himc_residual(&self.inv.mean, &tols));
        out.push(residuals::fit_special_isothermic(&md, &tols).report);
        to_py(py, &out)
    }

    /// T-transform of an isothermic surface; returns `(kappa, c)`.
    #[pyo3(signature = (r, profile="default"))]
    fn t_transform(&self, r: f64, profile: &str) -> PyResult<(PyField, PyField)> {
        let (out, _) = deform::t_transform(&self.conformal(), r, &tolerances(profile)?).map_err(py_err)?;
        Ok((PyField(out.kappa), PyField(out.schwarzian)))
    }

    /// Constrained Willmore family with a unimodular `lam`; returns `(kappa, c)`.
    #[pyo3(signature = (lam, profile="default"))]
    fn constrained_willmore(&self, lam: Complex64, profile: &str) -> PyResult<(PyField, PyField)> {
        let (out, _) =
            deform::constrained_willmore_family(&self.conformal(), lam, &tolerances(profile)?).map_err(py_err)?;
        Ok((PyField(out.kappa), PyField(out.schwarzian)))
    }

    /// Bonnet rotation of the Hopf differential; returns `(omega, H, Q)`.
    #[pyo3(signature = (theta, profile="default"))]
    fn bonnet(&self, theta: f64, profile: &str) -> PyResult<(PyField, PyField, PyField)> {
        let md = self.inv.metrical_data();
        let (out, _, _) = deform::bonnet_family_check(&md, theta, &tolerances(profile)?).map_err(py_err)?;
        Ok((PyField(out.omega), PyField(out.mean), PyField(out.hopf)))
    }
}

#[pyfunction]
fn flat_bonnet_solution(kmobius: f64, s: f64) -> PyResult<[f64; 4]> {
    hazzidakis::flat_bonnet_solution(kmobius, s).map_err(py_err)
}

/// Integrates the Hazzidakis equation; returns the sampled solution as a dict.
#[pyfunction]
fn integrate_hazzidakis<'py>(
    py: Python<'py>,
    kind: &str,
    s0: f64,
    initial: [f64; 3],
    s_end: f64,
    step: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let kind = BonnetType::parse(kind).map_err(py_err)?;
    let sol = hazzidakis::integrate(kind, s0, initial, s_end, step).map_err(py_err)?;
    to_py(py, &sol)
}

/// Similarity curvature of a curve sampled on a uniform arclength grid.
#[pyfunction]
#[pyo3(signature = (points, h, closed=false))]
fn similarity_curvature(points: Vec<Complex64>, h: f64, closed: bool) -> PyResult<Vec<f64>> {
    let c = PlaneCurveSamples::new(ParamKind::EuclideanArclength, h, 0.0, points, closed).map_err(py_err)?;
    simcurve::similarity_curvature(&c).map_err(py_err)
}

/// Advances periodic similarity curvature samples by `steps` Burgers steps.
#[pyfunction]
#[pyo3(signature = (u, period, steps, dt=None))]
fn burgers_evolve(u: Vec<f64>, period: f64, steps: usize, dt: Option<f64>) -> PyResult<Vec<f64>> {
    let state = SimCurvatureState::new(u, period).map_err(py_err)?;
    let ds = state.ds();
    let dt = dt.unwrap_or(simcurve::STABILITY_FACTOR * ds * ds);
    Ok(simcurve::burgers_evolve(&state, dt, steps).map_err(py_err)?.u)
}

#[pyfunction]
#[pyo3(signature = (u, ds, periodic=false))]
fn reconstruct_curve(u: Vec<f64>, ds: f64, periodic: bool) -> PyResult<Vec<Complex64>> {
    let c = simcurve::reconstruct_curve(&u, ds, periodic, CurveStart::default()).map_err(py_err)?;
    Ok(c.points)
}

/// Runs the acceptance suite, or one criterion; returns a list of result dicts.
#[pyfunction]
#[pyo3(signature = (criterion=None, seed=7))]
fn run_selftest(py: Python<'_>, criterion: Option<usize>, seed: u64) -> PyResult<Bound<'_, PyAny>> {
    let cfg = SelftestConfig { seed, ..SelftestConfig::default() };
    let results = match criterion {
        Some(id) if (1..=CRITERIA).contains(&id) => vec![selftest::run(id, &cfg)],
        Some(id) => return Err(PyValueError::new_err(format!("no criterion {id}"))),
        None => py.detach(|| selftest::run_all(&cfg)),
    };
    to_py(py, &results)
}

#[pymodule]
fn mlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyField>()?;
    m.add_class::<PySurface>()?;
    m.add_class::<PyInvariants>()?;
    m.add_function(wrap_pyfunction!(flat_bonnet_solution, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_hazzidakis, m)?)?;
    m.add_function(wrap_pyfunction!(similarity_curvature, m)?)?;
    m.add_function(wrap_pyfunction!(burgers_evolve, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct_curve, m)?)?;
    m.add_function(wrap_pyfunction!(run_selftest, m)?)?;
    Ok(())
}
