//! Python bindings: triangulations, CPWL functions, Riesz bounds, box
//! splines, and the nonlocal conditioning analysis.

use std::sync::Arc;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use cpwl::basis;
use cpwl::boxspline;
use cpwl::geometry::Point;
use cpwl::linalg::Matrix;
use cpwl::nonlocal;
use cpwl::riesz;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_points(points: Vec<Vec<f64>>) -> PyResult<Vec<Point>> {
    points
        .into_iter()
        .map(|c| Point::new(c).map_err(value_err))
        .collect()
}

fn to_matrix(rows: Vec<Vec<f64>>) -> PyResult<Matrix> {
    Matrix::from_rows(&rows).map_err(value_err)
}

/// Immutable simplicial triangulation.
#[pyclass(name = "Triangulation", frozen)]
struct PyTriangulation {
    inner: Arc<cpwl::Triangulation>,
}

#[pymethods]
impl PyTriangulation {
    /// Build from a vertex table and simplex index lists.
    #[new]
    fn new(vertices: Vec<Vec<f64>>, simplices: Vec<Vec<usize>>) -> PyResult<Self> {
        let t = cpwl::Triangulation::build(to_points(vertices)?, simplices).map_err(value_err)?;
        Ok(PyTriangulation { inner: Arc::new(t) })
    }

    /// Kuhn triangulation of an integer box with `extent[i]` cells per axis.
    #[staticmethod]
    fn kuhn(dim: usize, extent: Vec<usize>) -> PyResult<Self> {
        let t = cpwl::triangulation::kuhn_triangulation(dim, &extent).map_err(value_err)?;
        Ok(PyTriangulation { inner: Arc::new(t) })
    }

    /// 2-D Delaunay triangulation of a point list.
    #[staticmethod]
    fn delaunay2d(points: Vec<Vec<f64>>) -> PyResult<Self> {
        let t = cpwl::triangulation::delaunay_2d(&to_points(points)?).map_err(value_err)?;
        Ok(PyTriangulation { inner: Arc::new(t) })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let t = cpwl::Triangulation::load(path).map_err(|e| PyIOError::new_err(e.to_string()))?;
        Ok(PyTriangulation { inner: Arc::new(t) })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        self.inner
            .save(path)
            .map_err(|e| PyIOError::new_err(e.to_string()))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn n_vertices(&self) -> usize {
        self.inner.n_vertices()
    }

    #[getter]
    fn n_simplices(&self) -> usize {
        self.inner.n_simplices()
    }

    fn vertices(&self) -> Vec<Vec<f64>> {
        self.inner
            .vertices()
            .iter()
            .map(|p| p.coords().to_vec())
            .collect()
    }

    fn simplices(&self) -> Vec<Vec<usize>> {
        self.inner
            .simplices()
            .iter()
            .map(|s| s.vertex_ids().to_vec())
            .collect()
    }

    fn total_volume(&self) -> f64 {
        self.inner.total_volume()
    }

    /// (volume, cardinality, simplex ids) of the star of a vertex.
    fn star(&self, vertex_id: usize) -> PyResult<(f64, usize, Vec<usize>)> {
        let star = self.inner.star(vertex_id).map_err(value_err)?;
        Ok((star.volume, star.cardinality, star.simplex_ids))
    }

    /// (union_ok, intersection_ok, offending simplex pairs).
    fn validate(&self) -> (bool, bool, Vec<(usize, usize)>) {
        let report = self.inner.validate();
        (
            report.union_ok,
            report.intersection_ok,
            report.offending_pairs,
        )
    }

    /// Index of a simplex containing `x`, or None outside the domain.
    fn locate(&self, x: Vec<f64>) -> PyResult<Option<usize>> {
        Ok(self.inner.locate(&Point::new(x).map_err(value_err)?))
    }

    fn __repr__(&self) -> String {
        format!(
            "Triangulation(dim={}, vertices={}, simplices={})",
            self.inner.dim(),
            self.inner.n_vertices(),
            self.inner.n_simplices()
        )
    }
}

/// CPWL function: a triangulation plus one coefficient per vertex.
#[pyclass(name = "CpwlFunction", frozen)]
struct PyCpwlFunction {
    inner: basis::CpwlFunction,
}

#[pymethods]
impl PyCpwlFunction {
    #[new]
    fn new(triangulation: &PyTriangulation, coeffs: Vec<f64>) -> PyResult<Self> {
        let inner =
            basis::CpwlFunction::new(triangulation.inner.clone(), coeffs).map_err(value_err)?;
        Ok(PyCpwlFunction { inner })
    }

    fn eval(&self, x: Vec<f64>) -> PyResult<f64> {
        let p = Point::new(x).map_err(value_err)?;
        self.inner.eval(&p).map_err(value_err)
    }

    fn l2_norm(&self) -> f64 {
        self.inner.l2_norm()
    }

    #[getter]
    fn coeffs(&self) -> Vec<f64> {
        self.inner.coeffs().to_vec()
    }
}

/// Two-sided Riesz bounds with provenance.
#[pyclass(name = "RieszReport", frozen)]
struct PyRieszReport {
    #[pyo3(get)]
    lower: f64,
    #[pyo3(get)]
    upper: f64,
    #[pyo3(get)]
    condition: f64,
    #[pyo3(get)]
    method: String,
    #[pyo3(get)]
    star_volume_min: Option<f64>,
    #[pyo3(get)]
    star_volume_max: Option<f64>,
}

impl From<riesz::RieszReport> for PyRieszReport {
    fn from(r: riesz::RieszReport) -> Self {
        PyRieszReport {
            lower: r.lower,
            upper: r.upper,
            condition: r.condition,
            method: r.method.to_string(),
            star_volume_min: r.star_volume_min,
            star_volume_max: r.star_volume_max,
        }
    }
}

#[pymethods]
impl PyRieszReport {
    fn __repr__(&self) -> String {
        format!(
            "RieszReport(lower={}, upper={}, condition={}, method='{}')",
            self.lower, self.upper, self.condition, self.method
        )
    }
}

/// Hat-function value at `x` for the given vertex.
#[pyfunction]
fn eval_hat(t: &PyTriangulation, vertex_id: usize, x: Vec<f64>) -> PyResult<f64> {
    let p = Point::new(x).map_err(value_err)?;
    basis::eval_hat(&t.inner, vertex_id, &p).map_err(value_err)
}

/// Exact L_p norm of a hat function.
#[pyfunction]
fn lp_norm_hat(t: &PyTriangulation, vertex_id: usize, p: u32) -> PyResult<f64> {
    basis::lp_norm_hat(&t.inner, vertex_id, p).map_err(value_err)
}

/// Dense Gram matrix of the hat basis (raw convention).
#[pyfunction]
fn gram_matrix(t: &PyTriangulation) -> Vec<Vec<f64>> {
    let g = basis::gram_matrix(&t.inner);
    let m = g.matrix();
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

/// Exact Riesz bounds from the Gram eigenvalues.
#[pyfunction]
fn gram_eigen_bounds(t: &PyTriangulation) -> PyResult<PyRieszReport> {
    riesz::gram_eigen_bounds(&basis::gram_matrix(&t.inner))
        .map(Into::into)
        .map_err(value_err)
}

/// Star-volume Riesz bounds.
#[pyfunction]
fn star_volume_bounds(t: &PyTriangulation) -> PyRieszReport {
    riesz::star_volume_bounds(&t.inner).into()
}

/// Worst synthesis ratios over random coefficient vectors:
/// (min_ratio, max_ratio, within_bounds) against the gram-eigen bounds.
#[pyfunction]
#[pyo3(signature = (t, n_trials, seed = 0))]
fn verify_bounds_by_sampling(
    t: &PyTriangulation,
    n_trials: usize,
    seed: u64,
) -> PyResult<(f64, f64, bool)> {
    let report = riesz::gram_eigen_bounds(&basis::gram_matrix(&t.inner)).map_err(value_err)?;
    let check =
        riesz::verify_bounds_by_sampling(&t.inner, &report, n_trials, seed).map_err(value_err)?;
    Ok((check.min_ratio, check.max_ratio, check.within_bounds))
}

/// Empirical moments of the pairing quadratic form on random unit vectors
/// of C^(d+1): (mean of the form, mean of its square root).
#[pyfunction]
#[pyo3(signature = (d, n_samples, seed = 0))]
fn stochastic_conditioning(d: usize, n_samples: usize, seed: u64) -> (f64, f64) {
    riesz::stochastic_conditioning(d, n_samples, seed)
}

fn spec_from(dim: usize, xi: Option<Vec<Vec<f64>>>) -> PyResult<boxspline::BoxSplineSpec> {
    match xi {
        Some(rows) => boxspline::BoxSplineSpec::new(to_matrix(rows)?).map_err(value_err),
        None => Ok(boxspline::BoxSplineSpec::cartesian(dim)),
    }
}

/// Box-spline value via the signed hinge expansion.
#[pyfunction]
#[pyo3(signature = (x, xi = None))]
fn eval_box_spline_ghh(x: Vec<f64>, xi: Option<Vec<Vec<f64>>>) -> PyResult<f64> {
    let spec = spec_from(x.len(), xi)?;
    Ok(boxspline::eval_box_spline_ghh(&spec, &x))
}

/// Box-spline value via hat evaluation on the Kuhn triangulation.
#[pyfunction]
#[pyo3(signature = (x, xi = None))]
fn eval_box_spline_kuhn(x: Vec<f64>, xi: Option<Vec<Vec<f64>>>) -> PyResult<f64> {
    let spec = spec_from(x.len(), xi)?;
    Ok(boxspline::eval_box_spline_kuhn(&spec, &x))
}

/// Analytic lattice Riesz bounds plus swept extrema of the Fourier symbol:
/// (report, swept_min, swept_max).
#[pyfunction]
#[pyo3(signature = (dim, resolution = 64, xi = None))]
fn lattice_riesz_bounds(
    dim: usize,
    resolution: usize,
    xi: Option<Vec<Vec<f64>>>,
) -> PyResult<(PyRieszReport, f64, f64)> {
    let spec = spec_from(dim, xi)?;
    let bounds = boxspline::lattice_riesz_bounds(&spec, resolution).map_err(value_err)?;
    Ok((bounds.report.into(), bounds.sweep.min, bounds.sweep.max))
}

/// Autocorrelation table of the box spline: list of (offset, value) pairs.
#[pyfunction]
#[pyo3(signature = (dim, xi = None))]
fn autocorrelation_table(
    dim: usize,
    xi: Option<Vec<Vec<f64>>>,
) -> PyResult<Vec<(Vec<i64>, f64)>> {
    let spec = spec_from(dim, xi)?;
    Ok(boxspline::autocorrelation_table(&spec).entries().to_vec())
}

/// Closed-form lower bound on the nonlocal interpolation condition number.
#[pyfunction]
fn nonlocal_condition_lower_bound(k: usize) -> PyResult<f64> {
    nonlocal::nonlocal_condition_lower_bound(k).map_err(value_err)
}

/// Spectral condition number of the uniform-knot interpolation matrix.
#[pyfunction]
#[pyo3(signature = (k, h = 1.0))]
fn nonlocal_empirical_condition(k: usize, h: f64) -> PyResult<f64> {
    if k < 2 {
        return Err(PyValueError::new_err("need at least 2 knots"));
    }
    if h <= 0.0 {
        return Err(PyValueError::new_err("step must be positive"));
    }
    nonlocal::empirical_condition(&nonlocal::uniform_interpolation_matrix(k, h))
        .map_err(value_err)
}

/// Evaluate the nonlocal model theta at x for the given knots.
#[pyfunction]
fn eval_nonlocal(knots: Vec<f64>, theta: Vec<f64>, x: f64) -> PyResult<f64> {
    let model = nonlocal::NonlocalModel::new(knots, theta).map_err(value_err)?;
    Ok(model.eval(x))
}

/// Solve the uniform-knot interpolation for theta by forward substitution.
#[pyfunction]
fn solve_nonlocal_theta(values: Vec<f64>, h: f64) -> PyResult<Vec<f64>> {
    nonlocal::solve_uniform_theta(&values, h).map_err(value_err)
}

#[pymodule]
fn cpwl_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTriangulation>()?;
    m.add_class::<PyCpwlFunction>()?;
    m.add_class::<PyRieszReport>()?;
    m.add_function(wrap_pyfunction!(eval_hat, m)?)?;
    m.add_function(wrap_pyfunction!(lp_norm_hat, m)?)?;
    m.add_function(wrap_pyfunction!(gram_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(gram_eigen_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(star_volume_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(verify_bounds_by_sampling, m)?)?;
    m.add_function(wrap_pyfunction!(stochastic_conditioning, m)?)?;
    m.add_function(wrap_pyfunction!(eval_box_spline_ghh, m)?)?;
    m.add_function(wrap_pyfunction!(eval_box_spline_kuhn, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_riesz_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(autocorrelation_table, m)?)?;
    m.add_function(wrap_pyfunction!(nonlocal_condition_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(nonlocal_empirical_condition, m)?)?;
    m.add_function(wrap_pyfunction!(eval_nonlocal, m)?)?;
    m.add_function(wrap_pyfunction!(solve_nonlocal_theta, m)?)?;
    Ok(())
}
