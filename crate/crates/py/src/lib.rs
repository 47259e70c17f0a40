//! Python bindings: the map catalog, flow solving, conjugated iteration,
//! error analysis, and Schröder construction.

use iterflow::analysis;
use iterflow::conjugate;
use iterflow::maps::{self, MapSpec};
use iterflow::schroeder;
use iterflow::solver::{self, FlowSeries, UnitStepReport};
use iterflow::Coeff;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: iterflow::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A catalog map: forward/inverse evaluators, series coefficients, and a
/// closed-form flow where one exists.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Map {
    inner: MapSpec,
}

#[pymethods]
impl Map {
    /// Look up a built-in map: moebius, sine, or logistic (with lambda).
    #[staticmethod]
    #[pyo3(signature = (name, lambda_=None))]
    fn catalog(name: &str, lambda_: Option<f64>) -> PyResult<Self> {
        Ok(Map {
            inner: maps::catalog_get(name, lambda_).map_err(err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    fn multiplier(&self) -> f64 {
        self.inner.multiplier()
    }

    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }

    fn forward(&self, x: f64) -> PyResult<f64> {
        self.inner.forward(x).map_err(err)
    }

    fn inverse(&self, y: f64) -> PyResult<f64> {
        self.inner.inverse(y).map_err(err)
    }

    /// n-fold forward (n > 0) or inverse (n < 0) application.
    fn apply_n(&self, n: i64, x: f64) -> PyResult<f64> {
        self.inner.apply_n(n, x).map_err(err)
    }

    fn has_exact_flow(&self) -> bool {
        self.inner.has_exact_flow()
    }

    /// Closed-form flow x_t(x), where the catalog provides one.
    fn exact_flow(&self, t: f64, x: f64) -> PyResult<f64> {
        self.inner.exact_flow(t, x).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Map({})", self.inner.name())
    }
}

/// A solved flow x_t through a finite order: polynomial-in-t coefficients
/// (parabolic maps) or numbers at one fixed t.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Flow {
    inner: FlowSeries,
}

#[pymethods]
impl Flow {
    /// Solve the unit-step equation in exact polynomial-in-t mode.
    #[staticmethod]
    fn solve_exact(map: &Map, order: usize) -> PyResult<Self> {
        let series = map.inner.series(order).map_err(err)?;
        Ok(Flow {
            inner: solver::solve_flow_exact(&series, order).map_err(err)?,
        })
    }

    /// Solve the unit-step equation numerically at fixed t.
    #[staticmethod]
    fn solve_numeric(map: &Map, t: f64, order: usize) -> PyResult<Self> {
        let series = map.inner.series_f64(order).map_err(err)?;
        Ok(Flow {
            inner: solver::solve_flow_numeric(&series, t, order).map_err(err)?,
        })
    }

    fn order(&self) -> usize {
        self.inner.order()
    }

    fn is_exact(&self) -> bool {
        self.inner.is_exact()
    }

    /// Coefficients c_1..c_N evaluated at t.
    fn coeffs_at(&self, t: f64) -> PyResult<Vec<f64>> {
        Ok(self.inner.series_at(t).map_err(err)?.coeffs().to_vec())
    }

    /// Exact coefficients as polynomial strings in t.
    fn coeff_strings(&self) -> PyResult<Vec<String>> {
        let coeffs = self
            .inner
            .exact_coeffs()
            .ok_or_else(|| PyValueError::new_err("numeric flows have no polynomial form"))?;
        Ok(coeffs.iter().map(|c| c.to_string()).collect())
    }

    /// Velocity series coefficients as exact fraction strings.
    fn velocity_strings(&self) -> PyResult<Vec<String>> {
        let v = solver::velocity_series(&self.inner).map_err(err)?;
        Ok(v.coeffs().iter().map(|c| c.to_string()).collect())
    }

    /// Residual of the unit-step equation: (clean, numeric max |coefficient|).
    fn verify(&self) -> PyResult<(bool, Option<f64>)> {
        match solver::verify_unit_step(&self.inner).map_err(err)? {
            UnitStepReport::Exact { first_nonzero, .. } => Ok((first_nonzero.is_none(), None)),
            UnitStepReport::Numeric { max_abs, .. } => Ok((max_abs <= 1e-12, Some(max_abs))),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Flow(order={}, {})",
            self.inner.order(),
            if self.inner.is_exact() { "exact" } else { "numeric" }
        )
    }
}

/// Continuous iterate x_t(x) via the conjugated truncated series:
/// t splits into an integer walk and a fractional part handled by the
/// depth-fold conjugated approximant.
#[pyfunction]
fn iterate(map: &Map, t: f64, x: f64, order: usize, depth: u32) -> PyResult<f64> {
    conjugate::iterate_eval(&map.inner, t, x, order, depth).map_err(err)
}

/// Conjugated approximant A_{n,t}(x) at fractional t, using a prepared flow.
#[pyfunction]
fn conjugate_eval(map: &Map, flow: &Flow, t: f64, x: f64, depth: u32) -> PyResult<f64> {
    conjugate::ConjugatedApproximant::auto(map.inner.clone(), flow.inner.clone(), depth, x)
        .eval(t, x)
        .map_err(err)
}

/// Relative error (x_t - A_{n,t})/x_t against the map's closed-form flow.
#[pyfunction]
fn relative_error(map: &Map, t: f64, x: f64, order: usize, depth: u32) -> PyResult<f64> {
    let flow = conjugate::flow_for(&map.inner, order, t).map_err(err)?;
    Ok(analysis::relative_error(&map.inner, &flow, t, x, depth)
        .map_err(err)?
        .value)
}

/// Relative successive difference (A_n - A_{n-1})/A_n.
#[pyfunction]
fn successive_difference(map: &Map, t: f64, x: f64, order: usize, depth: u32) -> PyResult<f64> {
    let flow = conjugate::flow_for(&map.inner, order, t).map_err(err)?;
    Ok(
        analysis::successive_difference(&map.inner, &flow, t, x, depth)
            .map_err(err)?
            .value,
    )
}

/// Leading approximation to the lambda=2 logistic relative error.
#[pyfunction]
fn leading_error_logistic2(t: f64, x: f64, order: usize, depth: u32) -> PyResult<f64> {
    analysis::leading_error_logistic2(t, x, order, depth).map_err(err)
}

/// Radius-of-convergence estimates 1/|c_k(t)|^(1/k) from an exact flow;
/// zero coefficients yield None.
#[pyfunction]
fn radius_estimates(
    flow: &Flow,
    t: f64,
    k_lo: usize,
    k_hi: usize,
) -> PyResult<Vec<(usize, Option<f64>)>> {
    Ok(analysis::radius_estimates(&flow.inner, t, k_lo, k_hi)
        .map_err(err)?
        .into_iter()
        .map(|p| (p.k, p.estimate))
        .collect())
}

/// Sine extrema table rows (t, computed, reference, relative discrepancy).
#[pyfunction]
#[pyo3(signature = (ts, order=9, depth=5))]
fn extrema(ts: Vec<f64>, order: usize, depth: u32) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    Ok(analysis::extrema_table(&ts, order, depth)
        .map_err(err)?
        .into_iter()
        .map(|r| (r.t, r.computed, r.reference, r.rel_discrepancy))
        .collect())
}

/// Koenigs coefficients b_1..b_N (hyperbolic maps) as floats.
#[pyfunction]
fn koenigs_coeffs(map: &Map, order: usize) -> PyResult<Vec<f64>> {
    let series = map.inner.series(order).map_err(err)?;
    let psi = schroeder::koenigs_series(&series, order).map_err(err)?;
    Ok(psi.coeffs().iter().map(|b| b.approx()).collect())
}

/// Flow reconstruction through the Koenigs series: psi^{-1}(a1^t psi(x)).
#[pyfunction]
fn koenigs_flow(map: &Map, order: usize, t: f64, x: f64) -> PyResult<f64> {
    let series = map.inner.series(order).map_err(err)?;
    let psi = schroeder::koenigs_series(&series, order).map_err(err)?.to_f64();
    schroeder::flow_from_koenigs(&psi, t, x).map_err(err)
}

/// Parabolic Schröder expansion: (rho, [(k, p_k)]) as exact fraction strings.
#[pyfunction]
fn parabolic_psi(map: &Map, order: usize) -> PyResult<(String, Vec<(i64, String)>)> {
    let series = map.inner.series(order).map_err(err)?;
    let flow = solver::solve_flow_exact(&series, order).map_err(err)?;
    let velocity = solver::velocity_series(&flow).map_err(err)?;
    let psi = schroeder::parabolic_psi(&velocity).map_err(err)?;
    let terms = psi
        .terms()
        .iter()
        .map(|(&k, p)| (k, p.to_string()))
        .collect();
    Ok((psi.rho().to_string(), terms))
}

#[pymodule]
fn iterflow_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Map>()?;
    m.add_class::<Flow>()?;
    m.add_function(wrap_pyfunction!(iterate, m)?)?;
    m.add_function(wrap_pyfunction!(conjugate_eval, m)?)?;
    m.add_function(wrap_pyfunction!(relative_error, m)?)?;
    m.add_function(wrap_pyfunction!(successive_difference, m)?)?;
    m.add_function(wrap_pyfunction!(leading_error_logistic2, m)?)?;
    m.add_function(wrap_pyfunction!(radius_estimates, m)?)?;
    m.add_function(wrap_pyfunction!(extrema, m)?)?;
    m.add_function(wrap_pyfunction!(koenigs_coeffs, m)?)?;
    m.add_function(wrap_pyfunction!(koenigs_flow, m)?)?;
    m.add_function(wrap_pyfunction!(parabolic_psi, m)?)?;
    Ok(())
}
