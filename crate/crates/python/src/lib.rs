//! Python bindings: special functions, polygons, densities, Monte Carlo
//! estimates and the verification suite.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use ortholab::config::Tolerances;
use ortholab::hypgeom::ExtReal;
use ortholab::polygon::{IdealPolygon, OrthoGeodesic, PolygonReport};
use ortholab::verify::Suite;
use ortholab::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Quadrature { .. } | Error::Inconsistent { .. } => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyfunction]
fn li2(x: f64) -> PyResult<f64> {
    ortholab::dilog::li2(x).map_err(py_err)
}

#[pyfunction]
fn rogers_l(x: f64) -> PyResult<f64> {
    ortholab::dilog::rogers_l(x).map_err(py_err)
}

#[pyfunction]
fn polylog(k: u32, x: f64) -> PyResult<f64> {
    ortholab::dilog::polylog(k, x).map_err(py_err)
}

/// Cross-ratio `(z1 - z2)(z4 - z3)/((z1 - z3)(z4 - z2))`; `inf` is allowed.
#[pyfunction]
fn cross_ratio(z1: f64, z2: f64, z3: f64, z4: f64) -> PyResult<f64> {
    ortholab::hypgeom::cross_ratio(z1.into(), z2.into(), z3.into(), z4.into()).map_err(py_err)
}

#[pyfunction]
fn a_from_length(l: f64) -> PyResult<f64> {
    ortholab::hypgeom::a_from_length(l).map_err(py_err)
}

#[pyfunction]
fn b_from_length(l: f64) -> PyResult<f64> {
    ortholab::hypgeom::b_from_length(l).map_err(py_err)
}

#[pyfunction]
fn length_from_b(b: f64) -> PyResult<f64> {
    ortholab::hypgeom::length_from_b(b).map_err(py_err)
}

#[pyfunction]
fn lewin_partial_sum(r_max: u64) -> PyResult<f64> {
    ortholab::polygon::lewin_partial_sum(r_max).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (l, t, rel_tol = 1e-10))]
fn rho(l: f64, t: f64, rel_tol: f64) -> PyResult<f64> {
    ortholab::density::rho_with_tol(l, t, rel_tol).map_err(py_err)
}

#[pyfunction]
fn cusp_density(count: usize, t: f64) -> PyResult<f64> {
    ortholab::density::cusp_density(count, t).map_err(py_err)
}

/// `∫ rho(l, t) dt` over the whole support.
#[pyfunction]
fn rho_mass(l: f64) -> PyResult<f64> {
    ortholab::density::rho_mass(l, &Tolerances::default())
        .map(|m| m.total)
        .map_err(py_err)
}

#[pyfunction]
fn total_mass_f(l: f64) -> PyResult<f64> {
    ortholab::density::total_mass_f(l).map_err(py_err)
}

#[pyfunction]
fn big_g(a: f64) -> PyResult<f64> {
    ortholab::density::big_g(a).map_err(py_err)
}

#[pyfunction]
fn big_g_quadrature(py: Python<'_>, a: f64) -> PyResult<f64> {
    py.detach(|| ortholab::density::big_g_quadrature(a)).map_err(py_err)
}

/// `(estimate, stderr)` of the mass of one chart.
#[pyfunction]
#[pyo3(signature = (a, n_samples, seed = 0))]
fn mc_class_mass(py: Python<'_>, a: f64, n_samples: u64, seed: u64) -> PyResult<(f64, f64)> {
    let m = py
        .detach(|| ortholab::montecarlo::mc_class_mass(a, n_samples, seed))
        .map_err(py_err)?;
    Ok((m.estimate, m.stderr))
}

/// `(passed, lines)`: one block of text per criterion.
#[pyfunction]
#[pyo3(signature = (suite = "all", seed = 0))]
fn verify(py: Python<'_>, suite: &str, seed: u64) -> PyResult<(bool, Vec<String>)> {
    let suite: Suite = suite.parse().map_err(py_err)?;
    let report = py.detach(|| ortholab::verify::run_suite(suite, seed, &Tolerances::default()));
    Ok((report.passed(), report.results.iter().map(|r| r.to_string()).collect()))
}

#[pyclass(name = "OrthoGeodesic", module = "ortholab", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyOrthoGeodesic {
    i: usize,
    j: usize,
    b: f64,
    l: f64,
    a: f64,
}

impl From<&OrthoGeodesic> for PyOrthoGeodesic {
    fn from(e: &OrthoGeodesic) -> Self {
        PyOrthoGeodesic {
            i: e.i,
            j: e.j,
            b: e.b,
            l: e.l,
            a: e.a,
        }
    }
}

#[pymethods]
impl PyOrthoGeodesic {
    fn __repr__(&self) -> String {
        format!("OrthoGeodesic(i={}, j={}, b={}, l={})", self.i, self.j, self.b, self.l)
    }
}

#[pyclass(name = "IdealPolygon", module = "ortholab", frozen)]
struct PyIdealPolygon {
    inner: IdealPolygon,
}

#[pymethods]
impl PyIdealPolygon {
    /// Vertices as strictly increasing angles in `[0, 2π)`.
    #[new]
    fn new(angles: Vec<f64>) -> PyResult<Self> {
        IdealPolygon::from_angles(angles)
            .map(|inner| PyIdealPolygon { inner })
            .map_err(py_err)
    }

    #[staticmethod]
    fn regular(n: usize) -> PyResult<Self> {
        ortholab::polygon::regular_polygon(n)
            .map(|inner| PyIdealPolygon { inner })
            .map_err(py_err)
    }

    /// Vertices as points of the upper half-plane boundary in cyclic order;
    /// `float("inf")` is the point at infinity.
    #[staticmethod]
    fn from_points(points: Vec<f64>) -> PyResult<Self> {
        let points: Vec<ExtReal> = points.into_iter().map(ExtReal::from).collect();
        IdealPolygon::from_points(&points)
            .map(|inner| PyIdealPolygon { inner })
            .map_err(py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn angles(&self) -> Vec<f64> {
        self.inner.angles().to_vec()
    }

    fn area(&self) -> f64 {
        self.inner.area()
    }

    fn orthospectrum(&self) -> Vec<PyOrthoGeodesic> {
        ortholab::polygon::orthospectrum(&self.inner)
            .entries
            .iter()
            .map(PyOrthoGeodesic::from)
            .collect()
    }

    fn identity_defect(&self) -> f64 {
        ortholab::polygon::identity_defect(&self.inner)
    }

    /// `{"n", "vertices_deg", "ortho", "defect"}` as JSON.
    fn report_json(&self) -> PyResult<String> {
        serde_json::to_string(&PolygonReport::new(&self.inner)).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// The Monte Carlo run report as JSON.
    #[pyo3(signature = (n_samples, seed = 0))]
    fn mc_measure_json(&self, py: Python<'_>, n_samples: u64, seed: u64) -> PyResult<String> {
        let bins = ortholab::montecarlo::default_bins();
        let run = py
            .detach(|| ortholab::montecarlo::mc_polygon_measure(&self.inner, n_samples, seed, &bins))
            .map_err(py_err)?;
        serde_json::to_string(&ortholab::montecarlo::RunReport::new(&run))
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("IdealPolygon(n={}, angles={:?})", self.inner.n(), self.inner.angles())
    }
}

#[pymodule]
#[pyo3(name = "ortholab")]
fn ortholab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(li2, m)?)?;
    m.add_function(wrap_pyfunction!(rogers_l, m)?)?;
    m.add_function(wrap_pyfunction!(polylog, m)?)?;
    m.add_function(wrap_pyfunction!(cross_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(a_from_length, m)?)?;
    m.add_function(wrap_pyfunction!(b_from_length, m)?)?;
    m.add_function(wrap_pyfunction!(length_from_b, m)?)?;
    m.add_function(wrap_pyfunction!(lewin_partial_sum, m)?)?;
    m.add_function(wrap_pyfunction!(rho, m)?)?;
    m.add_function(wrap_pyfunction!(cusp_density, m)?)?;
    m.add_function(wrap_pyfunction!(rho_mass, m)?)?;
    m.add_function(wrap_pyfunction!(total_mass_f, m)?)?;
    m.add_function(wrap_pyfunction!(big_g, m)?)?;
    m.add_function(wrap_pyfunction!(big_g_quadrature, m)?)?;
    m.add_function(wrap_pyfunction!(mc_class_mass, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_class::<PyIdealPolygon>()?;
    m.add_class::<PyOrthoGeodesic>()?;
    Ok(())
}
