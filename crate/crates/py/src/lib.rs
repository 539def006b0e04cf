//! Python bindings: scenarios, metric evaluation, the optimizer and the grid oracle.

// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;

use insarfopt_core::geometry::{coverage as coverage_of, master_x_for};
use insarfopt_core::metrics::{evaluate_constraints, metrics};
use insarfopt_core::oracle::{grid_search_mode, refine_mode};
use insarfopt_core::sca::{objective_tilde, run, schedule_for, InitialPoint};
use insarfopt_core::{Error, Formation, GridSpec, Mode, OracleResult, Position, RunReport, SCAConfig, ScenarioConfig};
use pyo3::exceptions::{PyException, PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

pyo3::create_exception!(
    insarfopt,
    InfeasibleError,
    PyException,
    "The scenario admits no feasible formation."
);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::Infeasible(_) => InfeasibleError::new_err(e.to_string()),
        Error::Solver(_) | Error::Output(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    mode.parse().map_err(to_py)
}

fn json_to_py(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

type Pair = (f64, f64);

fn formation(q1: Pair, q2: Pair) -> Formation {
    Formation::new(Position::new(q1.0, q1.1), Position::new(q2.0, q2.1))
}

fn pairs(f: &Formation) -> (Pair, Pair) {
    ((f.q1.x, f.q1.z), (f.q2.x, f.q2.z))
}

/// Mission, radar, link and threshold parameters, all in SI units.
#[pyclass(name = "Scenario", module = "insarfopt", frozen)]
struct PyScenario {
    inner: ScenarioConfig,
}

#[pymethods]
impl PyScenario {
    /// The bundled reference scenario.
    #[staticmethod]
    fn reference() -> Self {
        PyScenario {
            inner: ScenarioConfig::reference(),
        }
    }

    #[staticmethod]
    #[pyo3(signature = (path, overrides = None))]
    fn load(path: PathBuf, overrides: Option<Vec<String>>) -> PyResult<Self> {
        let inner = ScenarioConfig::load_with_overrides(path, &overrides.unwrap_or_default()).map_err(to_py)?;
        Ok(PyScenario { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (text, overrides = None))]
    fn from_toml(text: &str, overrides: Option<Vec<String>>) -> PyResult<Self> {
        let inner =
            ScenarioConfig::from_toml_str_with_overrides(text, &overrides.unwrap_or_default()).map_err(to_py)?;
        Ok(PyScenario { inner })
    }

    fn to_toml(&self) -> String {
        self.inner.to_toml_string()
    }

    fn fingerprint(&self) -> String {
        self.inner.fingerprint()
    }

    /// Copy with `section.key=value` overrides applied, e.g. `"comm.p_com_max=10 dBm"`.
    fn with_overrides(&self, overrides: Vec<String>) -> PyResult<Self> {
        Self::from_toml(&self.inner.to_toml_string(), Some(overrides))
    }

    /// Copy with one sweep parameter (p_com_max, h_amb_max, gamma_snr_min, gamma_rg_min) replaced.
    fn with_param(&self, name: &str, value: f64) -> PyResult<Self> {
        let param = name.parse().map_err(to_py)?;
        let inner = self.inner.with_param(param, value).map_err(to_py)?;
        Ok(PyScenario { inner })
    }

    /// Master ground range that centers the target at altitude `z1`.
    fn master_x(&self, z1: f64) -> f64 {
        master_x_for(z1, self.inner.mission.target_x, self.inner.radar.theta_d)
    }

    #[getter]
    fn num_slots(&self) -> usize {
        self.inner.mission.num_slots
    }

    #[getter]
    fn target_x(&self) -> f64 {
        self.inner.mission.target_x
    }

    #[getter]
    fn p_com_max(&self) -> f64 {
        self.inner.comm.p_com_max
    }

    #[getter]
    fn h_amb_max(&self) -> f64 {
        self.inner.thresholds.h_amb_max
    }

    #[getter]
    fn altitude_range(&self) -> Pair {
        (self.inner.thresholds.z_min, self.inner.thresholds.z_max)
    }

    fn __repr__(&self) -> String {
        format!("Scenario(fingerprint='{}')", self.inner.fingerprint())
    }
}

/// Result of one optimizer run.
#[pyclass(name = "RunReport", module = "insarfopt", frozen)]
struct PyRunReport {
    inner: RunReport,
}

#[pymethods]
impl PyRunReport {
    #[getter]
    fn mode(&self) -> &'static str {
        self.inner.mode.name()
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn outer_iterations(&self) -> usize {
        self.inner.outer_iterations
    }

    /// `((x1, z1), (x2, z2))` in meters.
    #[getter]
    fn formation(&self) -> (Pair, Pair) {
        pairs(&self.inner.formation)
    }

    #[getter]
    fn coverage_m2(&self) -> f64 {
        self.inner.coverage_m2
    }

    #[getter]
    fn objective_tilde(&self) -> f64 {
        self.inner.objective_tilde
    }

    #[getter]
    fn b_perp_m(&self) -> f64 {
        self.inner.b_perp_m
    }

    #[getter]
    fn h_amb_m(&self) -> f64 {
        self.inner.h_amb_m
    }

    #[getter]
    fn energy_j(&self) -> Pair {
        (self.inner.energy_j[0], self.inner.energy_j[1])
    }

    #[getter]
    fn p1_watts(&self) -> Vec<f64> {
        self.inner.schedules.p1_watts.clone()
    }

    #[getter]
    fn p2_watts(&self) -> Vec<f64> {
        self.inner.schedules.p2_watts.clone()
    }

    /// Objective after every accepted inner iterate.
    #[getter]
    fn trace(&self) -> Vec<f64> {
        self.inner.inner_trace.iter().map(|r| r.objective).collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        json_to_py(py, &self.inner.to_json())
    }

    fn __repr__(&self) -> String {
        format!(
            "RunReport(mode='{}', coverage_m2={:.2}, converged={})",
            self.inner.mode.name(),
            self.inner.coverage_m2,
            if self.inner.converged { "True" } else { "False" }
        )
    }
}

/// Grid-search outcome.
#[pyclass(name = "OracleResult", module = "insarfopt", frozen)]
struct PyOracleResult {
    inner: OracleResult,
}

#[pymethods]
impl PyOracleResult {
    #[getter]
    fn evaluated(&self) -> usize {
        self.inner.evaluated
    }

    #[getter]
    fn feasible(&self) -> usize {
        self.inner.feasible
    }

    /// Best formation, or None when no grid point is feasible.
    #[getter]
    fn best_formation(&self) -> Option<(Pair, Pair)> {
        self.inner.best.as_ref().map(|b| pairs(&b.formation))
    }

    #[getter]
    fn best_coverage_m2(&self) -> Option<f64> {
        self.inner.best.as_ref().map(|b| b.coverage_m2)
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.inner).expect("oracle result serializes")
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        json_to_py(py, &self.to_json())
    }

    fn __repr__(&self) -> String {
        format!(
            "OracleResult(best_coverage_m2={}, feasible={}, evaluated={})",
            self.best_coverage_m2().map_or("None".to_owned(), |c| format!("{c:.2}")),
            self.inner.feasible,
            self.inner.evaluated
        )
    }
}

/// Swath coverage in m² of the formation `q1 = (x1, z1)`, `q2 = (x2, z2)`.
#[pyfunction]
fn coverage(scenario: &PyScenario, q1: Pair, q2: Pair) -> f64 {
    let s = &scenario.inner;
    coverage_of(&formation(q1, q2), &s.mission, &s.radar)
}

/// Metrics and constraint check of a formation flown with the cheapest
/// admissible power schedules.
#[pyfunction]
fn evaluate<'py>(py: Python<'py>, scenario: &PyScenario, q1: Pair, q2: Pair) -> PyResult<Bound<'py, PyDict>> {
    let s = &scenario.inner;
    let f = formation(q1, q2);
    let m = metrics(&f, s);
    let p1 = schedule_for(f.q1, s, 0, Mode::Proposed);
    let p2 = schedule_for(f.q2, s, 1, Mode::Proposed);
    let rep = evaluate_constraints(&f, (&p1, &p2), s);
    let d = PyDict::new(py);
    d.set_item("coverage_m2", coverage_of(&f, &s.mission, &s.radar))?;
    d.set_item("objective_tilde", objective_tilde(&f, &s.radar))?;
    d.set_item("b_perp_m", m.b_perp)?;
    d.set_item("h_amb_m", m.h_amb)?;
    d.set_item("baseline_m", m.baseline)?;
    d.set_item("gamma_rg", m.gamma_rg)?;
    d.set_item("gamma_snr", m.gamma_snr)?;
    d.set_item("feasible", rep.is_feasible())?;
    d.set_item("violated", rep.violated())?;
    let slacks = PyDict::new(py);
    for r in &rep.records {
        slacks.set_item(r.name, r.slack)?;
    }
    d.set_item("slacks", slacks)?;
    Ok(d)
}

/// Run the optimizer. `mode` is proposed, benchmark1 or benchmark2; `init`
/// is an optional `(z1, x2, z2)` starting point.
#[pyfunction]
#[pyo3(signature = (scenario, mode = "proposed", init = None, epsilon = 1e-4, max_iters = 50, max_outer = 20))]
fn solve(
    py: Python<'_>,
    scenario: &PyScenario,
    mode: &str,
    init: Option<(f64, f64, f64)>,
    epsilon: f64,
    max_iters: usize,
    max_outer: usize,
) -> PyResult<PyRunReport> {
    let mode = parse_mode(mode)?;
    if !(epsilon > 0.0) || max_iters == 0 || max_outer == 0 {
        return Err(PyValueError::new_err(
            "epsilon must be positive and the iteration caps nonzero",
        ));
    }
    let cfg = SCAConfig {
        epsilon,
        max_iters,
        max_outer,
        ..SCAConfig::default()
    };
    let init = init.map(|(z1, x2, z2)| InitialPoint {
        z1,
        q2: Position::new(x2, z2),
    });
    let s = &scenario.inner;
    let inner = py.detach(|| run(s, init, &cfg, mode)).map_err(to_py)?;
    Ok(PyRunReport { inner })
}

/// Exhaustive search on a uniform grid of spacing `step` meters.
#[pyfunction]
#[pyo3(signature = (scenario, step = 1.0, mode = "proposed"))]
fn oracle(py: Python<'_>, scenario: &PyScenario, step: f64, mode: &str) -> PyResult<PyOracleResult> {
    let mode = parse_mode(mode)?;
    let s = &scenario.inner;
    let inner = py
        .detach(|| grid_search_mode(s, &GridSpec::uniform(s, step), mode))
        .map_err(to_py)?;
    Ok(PyOracleResult { inner })
}

/// Fine grid search in a box of half-width `radius` around a formation.
#[pyfunction]
#[pyo3(signature = (scenario, q1, q2, radius = 2.0, step = 0.01, mode = "proposed"))]
fn refine(
    py: Python<'_>,
    scenario: &PyScenario,
    q1: Pair,
    q2: Pair,
    radius: f64,
    step: f64,
    mode: &str,
) -> PyResult<PyOracleResult> {
    let mode = parse_mode(mode)?;
    let s = &scenario.inner;
    let f = formation(q1, q2);
    let inner = py.detach(|| refine_mode(s, &f, radius, step, mode)).map_err(to_py)?;
    Ok(PyOracleResult { inner })
}

/// Register the module contents; shared by the extension entry point and tests.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PyRunReport>()?;
    m.add_class::<PyOracleResult>()?;
    m.add("InfeasibleError", m.py().get_type::<InfeasibleError>())?;
    m.add_function(wrap_pyfunction!(coverage, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(refine, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

#[pymodule]
fn insarfopt(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}
