//! Python module `antisync`: scenario loading, gain verification,
//! certificates and simulation.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyDict};

use antisync_core::cli::{self, CliError, Scenario as CoreScenario};
use antisync_core::criteria::{Criteria, Mode};
use antisync_core::dde_sim::{simulate, Scheme};
use antisync_core::model::DelayKind;
use antisync_core::split_complex::{product_split as split_product, SplitComplex};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn cli_error(e: CliError) -> PyErr {
    match e {
        CliError::Sim(_) => PyRuntimeError::new_err(e.to_string()),
        _ => value_error(e),
    }
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    json_to_py(py, &serde_json::to_string(value).map_err(value_error)?)
}

fn parse_mode(mode: Option<&str>) -> PyResult<Option<Mode>> {
    mode.map(|m| m.parse::<Mode>().map_err(PyValueError::new_err)).transpose()
}

fn as_split(v: &Bound<'_, PyAny>) -> PyResult<SplitComplex> {
    if let Ok(c) = v.cast::<PyComplex>() {
        return Ok(SplitComplex::new(c.real(), c.imag()));
    }
    Ok(SplitComplex::new(v.extract::<f64>()?, 0.0))
}

/// A validated scenario file.
#[pyclass(name = "Scenario", module = "antisync")]
struct PyScenario {
    inner: CoreScenario,
}

#[pymethods]
impl PyScenario {
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let inner = cli::parse_config(path).map_err(|e| value_error(format!("[{}] {e}", e.code())))?;
        Ok(PyScenario { inner })
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let inner = CoreScenario::parse_str(text).map_err(|e| value_error(format!("[{}] {e}", e.code())))?;
        Ok(PyScenario { inner })
    }

    fn to_toml(&self) -> String {
        self.inner.to_toml()
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.network.n()
    }

    #[getter]
    fn tau(&self) -> f64 {
        self.inner.network.tau()
    }

    #[getter]
    fn controlled(&self) -> bool {
        self.inner.gains.is_some()
    }

    /// Per-neuron thresholds as a list of dicts.
    #[pyo3(signature = (mode = None, beta = 0.5))]
    fn thresholds<'py>(&self, py: Python<'py>, mode: Option<&str>, beta: f64) -> PyResult<Bound<'py, PyAny>> {
        let s = &self.inner;
        let beta = s.gains.as_ref().map_or(beta, |g| g.beta);
        let mode = parse_mode(mode)?.unwrap_or(s.mode);
        let crit = Criteria::new(&s.network, &s.weights, beta, mode).map_err(value_error)?;
        to_py(py, &crit.thresholds().neurons)
    }

    /// Full verification report as a dict.
    #[pyo3(signature = (mode = None))]
    fn verify<'py>(&self, py: Python<'py>, mode: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
        let (report, _) = cli::run_verify(&self.inner, parse_mode(mode)?).map_err(cli_error)?;
        json_to_py(py, &report.to_json())
    }

    /// Report for user-chosen `epsilon` and/or `rho`.
    #[pyo3(signature = (epsilon = None, rho = None, mode = None))]
    fn bounds<'py>(
        &self,
        py: Python<'py>,
        epsilon: Option<f64>,
        rho: Option<f64>,
        mode: Option<&str>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let (report, _) = cli::run_bounds(&self.inner, parse_mode(mode)?, epsilon, rho).map_err(cli_error)?;
        json_to_py(py, &report.to_json())
    }

    /// `(M(E1(0)), T1, T2)`-style certificate for the given constants.
    fn certificate<'py>(&self, py: Python<'py>, epsilon: f64, rho: f64) -> PyResult<Bound<'py, PyAny>> {
        let s = &self.inner;
        if !(epsilon > 0.0 && rho > 0.0) {
            return Err(value_error("epsilon and rho must be > 0"));
        }
        let beta = s.gains.as_ref().map_or(0.5, |g| g.beta);
        let crit = Criteria::new(&s.network, &s.weights, beta, s.mode).map_err(value_error)?;
        to_py(py, &crit.certificate(epsilon, rho))
    }

    /// Recorded trajectory as a dict of lists.
    #[pyo3(signature = (dt = None, t_end = None, scheme = None))]
    fn simulate<'py>(
        &self,
        py: Python<'py>,
        dt: Option<f64>,
        t_end: Option<f64>,
        scheme: Option<&str>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let s = &self.inner;
        let mut cfg = s.sim.clone();
        if let Some(dt) = dt {
            cfg.dt = dt;
        }
        if let Some(t_end) = t_end {
            cfg.t_end = t_end;
        }
        if let Some(scheme) = scheme {
            cfg.scheme = scheme.parse::<Scheme>().map_err(PyValueError::new_err)?;
        }
        let monitors = cli::monitor_params(s);
        let traj = py
            .detach(|| simulate(&s.network, s.gains.as_ref(), &monitors, &cfg))
            .map_err(|e| cli_error(e.into()))?;

        let out = PyDict::new(py);
        let n = traj.n;
        let column = |f: &dyn Fn(usize) -> f64| -> Vec<f64> { (0..traj.len()).map(f).collect() };
        out.set_item("t", &traj.times)?;
        for j in 0..n {
            out.set_item(format!("e_{j}_re"), column(&|i| traj.e[i][j].re))?;
            out.set_item(format!("e_{j}_im"), column(&|i| traj.e[i][j].im))?;
        }
        out.set_item("norm_e1", &traj.norm_e1)?;
        out.set_item("monitor_m", &traj.monitor_m)?;
        out.set_item("norm_e2", &traj.norm_e2)?;
        out.set_item("monitor_v", &traj.monitor_v)?;
        out.set_item("max_error", column(&|i| traj.max_error(i)))?;
        out.set_item("settling_time", traj.settling_time)?;
        out.set_item("chattering_amplitude", traj.chattering_amplitude)?;
        out.set_item("phase_two_start", traj.phase_two_start)?;
        Ok(out)
    }

    /// Sweep rows for `mu`/`rho` scale factors.
    fn sweep<'py>(&self, py: Python<'py>, scales: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
        let s = &self.inner;
        let rows = py.detach(|| cli::run_sweep(s, &scales)).map_err(cli_error)?;
        to_py(py, &rows)
    }

    fn __repr__(&self) -> String {
        format!("Scenario({})", self.inner)
    }
}

/// Complex product computed through the split real representation.
#[pyfunction]
fn product_split<'py>(py: Python<'py>, a: &Bound<'py, PyAny>, b: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyComplex>> {
    let p = split_product(as_split(a)?, as_split(b)?);
    Ok(PyComplex::from_doubles(py, p.re, p.im))
}

/// Evaluates a catalog delay, e.g. `eval_delay("logistic-shifted", 0.5, t)`.
#[pyfunction]
fn eval_delay(kind: &str, parameter: f64, t: f64) -> PyResult<f64> {
    let delay = match kind {
        "constant" => DelayKind::Constant { value: parameter },
        "logistic-shifted" => DelayKind::LogisticShifted { shift: parameter },
        "reciprocal-abs-cos" => DelayKind::ReciprocalAbsCos { omega: parameter },
        "reciprocal-abs-sin" => DelayKind::ReciprocalAbsSin { omega: parameter },
        other => return Err(value_error(format!("unknown delay kind `{other}`"))),
    };
    Ok(delay.eval(t))
}

#[pymodule]
pub fn antisync(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_function(wrap_pyfunction!(product_split, m)?)?;
    m.add_function(wrap_pyfunction!(eval_delay, m)?)?;
    Ok(())
}
