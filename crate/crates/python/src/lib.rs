//! Python bindings: grids, fields, solver configs, runs and the analysis
//! helpers.

use std::sync::Arc;
use std::time::Duration;

use multisplit::analysis::{self, BenchRow, BenchSettings, MethodCase};
use multisplit::operators::{self, TridiagonalSystem};
use multisplit::splitting::{self, RunOptions, Snapshots};
use multisplit::{ComplexScalar, Error, MethodId, PhysicalConfig, PotentialSpec};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidGrid(_)
        | Error::Dimension { .. }
        | Error::Config(_)
        | Error::UndefinedOrder(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn parse<T: std::str::FromStr>(s: &str) -> PyResult<T>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>()
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyclass(name = "Grid", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGrid(Arc<multisplit::Grid1D>);

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (cells, length = 1.0))]
    fn new(cells: usize, length: f64) -> PyResult<Self> {
        Ok(Self(Arc::new(
            multisplit::build_grid(cells, length).map_err(py_err)?,
        )))
    }

    #[getter]
    fn cells(&self) -> usize {
        self.0.cells()
    }

    #[getter]
    fn length(&self) -> f64 {
        self.0.length()
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.0.dx()
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.0.nodes().to_vec()
    }

    #[getter]
    fn interior(&self) -> Vec<f64> {
        self.0.interior().to_vec()
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid(cells={}, length={:?})",
            self.0.cells(),
            self.0.length()
        )
    }
}

#[pyclass(name = "WaveField", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyWaveField(multisplit::WaveField);

#[pymethods]
impl PyWaveField {
    #[new]
    fn new(grid: &PyGrid, values: Vec<ComplexScalar>) -> PyResult<Self> {
        Ok(Self(
            multisplit::WaveField::new(Arc::clone(&grid.0), values).map_err(py_err)?,
        ))
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(Arc::clone(self.0.grid_arc()))
    }

    #[getter]
    fn values(&self) -> Vec<ComplexScalar> {
        self.0.values().to_vec()
    }

    fn abs2(&self) -> Vec<f64> {
        self.0.values().iter().map(|v| v.norm_sqr()).collect()
    }

    fn norm_l2(&self) -> f64 {
        self.0.norm_l2()
    }

    fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "WaveField(len={}, norm_l2={:e})",
            self.0.len(),
            self.0.norm_l2()
        )
    }
}

/// Scaled-problem run configuration. `micro_steps` defaults to
/// `round(1/epsilon)` and `micro_used` to `max(1, M/2)`.
#[pyclass(name = "SolverConfig", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySolverConfig(multisplit::SolverConfig);

#[pymethods]
impl PySolverConfig {
    #[new]
    #[pyo3(signature = (
        method = "ab", epsilon = 1e-2, cells = 100, dt = 8e-4, horizon = 0.1,
        potential = "sine", micro_steps = None, micro_used = None
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        method: &str,
        epsilon: f64,
        cells: usize,
        dt: f64,
        horizon: f64,
        potential: &str,
        micro_steps: Option<usize>,
        micro_used: Option<usize>,
    ) -> PyResult<Self> {
        let mut cfg = multisplit::SolverConfig::scaled(
            epsilon,
            cells,
            dt,
            horizon,
            parse::<PotentialSpec>(potential)?,
            parse::<MethodId>(method)?,
        )
        .map_err(py_err)?;
        if let Some(m) = micro_steps {
            cfg.micro_m = m;
            cfg.micro_used = multisplit::model::default_micro_used(m);
        }
        if let Some(mt) = micro_used {
            cfg.micro_used = mt;
        }
        cfg.validate().map_err(py_err)?;
        Ok(Self(cfg))
    }

    #[getter]
    fn method(&self) -> &'static str {
        self.0.method.cli_name()
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.0.epsilon
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.0.dt_macro
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.0.horizon
    }

    #[getter]
    fn micro_steps(&self) -> usize {
        self.0.micro_m
    }

    #[getter]
    fn micro_used(&self) -> usize {
        self.0.micro_used
    }

    #[getter]
    fn potential(&self) -> &'static str {
        self.0.potential.name()
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(Arc::clone(&self.0.grid))
    }

    fn dt_micro(&self) -> f64 {
        self.0.dt_micro()
    }

    fn macro_steps(&self) -> usize {
        self.0.macro_steps().count
    }

    fn with_method(&self, method: &str) -> PyResult<Self> {
        Ok(Self(self.0.with_method(parse(method)?)))
    }

    fn with_dt(&self, dt: f64) -> PyResult<Self> {
        let cfg = self.0.with_dt(dt);
        cfg.validate().map_err(py_err)?;
        Ok(Self(cfg))
    }

    fn with_micro(&self, micro_steps: usize, micro_used: usize) -> PyResult<Self> {
        let cfg = self.0.with_micro(micro_steps, micro_used);
        cfg.validate().map_err(py_err)?;
        Ok(Self(cfg))
    }

    fn __repr__(&self) -> String {
        let c = &self.0;
        format!(
            "SolverConfig(method={:?}, epsilon={:?}, cells={}, dt={:?}, horizon={:?}, potential={:?}, micro_steps={}, micro_used={})",
            c.method.cli_name(),
            c.epsilon,
            c.grid.cells(),
            c.dt_macro,
            c.horizon,
            c.potential.name(),
            c.micro_m,
            c.micro_used
        )
    }
}

#[pyclass(name = "RunResult", frozen, skip_from_py_object)]
struct PyRunResult(splitting::RunResult);

#[pymethods]
impl PyRunResult {
    #[getter]
    fn final_field(&self) -> PyWaveField {
        PyWaveField(self.0.final_field.clone())
    }

    #[getter]
    fn final_time(&self) -> f64 {
        self.0.final_time
    }

    #[getter]
    fn snapshots(&self) -> Vec<(f64, PyWaveField)> {
        self.0
            .snapshots
            .iter()
            .map(|(t, f)| (*t, PyWaveField(f.clone())))
            .collect()
    }

    #[getter]
    fn wall_seconds(&self) -> f64 {
        self.0.wall_seconds
    }

    #[getter]
    fn steps_taken(&self) -> usize {
        self.0.steps_taken
    }

    #[getter]
    fn stability_margin(&self) -> f64 {
        self.0.stability_margin
    }

    #[getter]
    fn method(&self) -> &'static str {
        self.0.method.cli_name()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.0.warnings.iter().map(ToString::to_string).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "RunResult(method={:?}, steps_taken={}, final_time={:?})",
            self.0.method.cli_name(),
            self.0.steps_taken,
            self.0.final_time
        )
    }
}

#[pyfunction]
fn init_scaled(grid: &PyGrid) -> PyResult<PyWaveField> {
    Ok(PyWaveField(
        multisplit::init_scaled(&grid.0).map_err(py_err)?,
    ))
}

#[pyfunction]
fn eval_potential(potential: &str, x: f64) -> PyResult<f64> {
    Ok(multisplit::eval_potential(parse(potential)?, x))
}

/// Runs `config` from `initial` (default: the scaled initial state).
#[pyfunction]
#[pyo3(signature = (config, initial = None, snapshots = 10))]
fn run(
    py: Python<'_>,
    config: &PySolverConfig,
    initial: Option<&PyWaveField>,
    snapshots: usize,
) -> PyResult<PyRunResult> {
    let init = match initial {
        Some(f) => f.0.clone(),
        None => multisplit::init_scaled(&config.0.grid).map_err(py_err)?,
    };
    let opts = RunOptions {
        snapshots: if snapshots == 0 {
            Snapshots::None
        } else {
            Snapshots::Count(snapshots)
        },
        time_budget: None,
    };
    let cfg = config.0.clone();
    let result = py
        .detach(move || splitting::run_with(&cfg, &init, &opts))
        .map_err(py_err)?;
    Ok(PyRunResult(result))
}

#[pyfunction]
fn l1_error(a: &PyWaveField, b: &PyWaveField) -> PyResult<f64> {
    analysis::l1_error(&a.0, &b.0).map_err(py_err)
}

#[pyfunction]
fn observed_order(err_coarse: f64, err_fine: f64) -> PyResult<f64> {
    analysis::observed_order(err_coarse, err_fine).map_err(py_err)
}

/// Solves the tridiagonal system `(lower, diag, upper) x = rhs`.
#[pyfunction]
fn thomas_solve(
    lower: Vec<ComplexScalar>,
    diag: Vec<ComplexScalar>,
    upper: Vec<ComplexScalar>,
    rhs: Vec<ComplexScalar>,
) -> PyResult<Vec<ComplexScalar>> {
    let sys = TridiagonalSystem::new(lower, diag, upper).map_err(py_err)?;
    operators::thomas_solve(&sys, &rhs).map_err(py_err)
}

#[pyfunction]
fn extrapolate_linear(
    u_prev: &PyWaveField,
    u_last: &PyWaveField,
    dt_micro: f64,
    micro_used: usize,
    dt_target: f64,
) -> PyResult<PyWaveField> {
    splitting::extrapolate_linear(&u_prev.0, &u_last.0, dt_micro, micro_used, dt_target)
        .map(PyWaveField)
        .map_err(py_err)
}

#[pyfunction]
fn extrapolate_quadratic(
    u_mm2: &PyWaveField,
    u_prev: &PyWaveField,
    u_last: &PyWaveField,
    dt_micro: f64,
    micro_used: usize,
    dt_target: f64,
) -> PyResult<PyWaveField> {
    splitting::extrapolate_quadratic(
        &u_mm2.0, &u_prev.0, &u_last.0, dt_micro, micro_used, dt_target,
    )
    .map(PyWaveField)
    .map_err(py_err)
}

fn parse_methods(names: Vec<String>) -> PyResult<Vec<MethodId>> {
    names.iter().map(|n| parse::<MethodId>(n)).collect()
}

fn rows_to_dicts<'py>(py: Python<'py>, rows: &[BenchRow]) -> PyResult<Vec<Bound<'py, PyDict>>> {
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("method", r.method.cli_name())?;
            d.set_item("dt", r.dt_macro)?;
            d.set_item("M", r.micro_m)?;
            d.set_item("Mtilde", r.micro_used)?;
            d.set_item("error_l1", r.error_l1)?;
            d.set_item("wall_seconds", r.wall_seconds)?;
            d.set_item("status", r.status.as_str())?;
            Ok(d)
        })
        .collect()
}

/// Error table against the unsplit scheme at `config.dt`, one dict per row.
#[pyfunction]
#[pyo3(signature = (config, methods, micro, time_budget = 120.0))]
fn bench_errors<'py>(
    py: Python<'py>,
    config: &PySolverConfig,
    methods: Vec<String>,
    micro: Vec<(usize, usize)>,
    time_budget: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let ms = parse_methods(methods)?;
    let settings = BenchSettings {
        time_budget: Duration::from_secs_f64(time_budget),
        ..BenchSettings::default()
    };
    let cfg = config.0.clone();
    let rows = py
        .detach(move || analysis::bench_errors(&cfg, &ms, &micro, &settings))
        .map_err(py_err)?;
    rows_to_dicts(py, &rows)
}

/// Median wall time of each method on each `dt`, one dict per row.
#[pyfunction]
#[pyo3(signature = (config, methods, dts, repetitions = 3, time_budget = 120.0))]
fn bench_timing<'py>(
    py: Python<'py>,
    config: &PySolverConfig,
    methods: Vec<String>,
    dts: Vec<f64>,
    repetitions: usize,
    time_budget: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let ms = parse_methods(methods)?;
    let settings = BenchSettings {
        time_budget: Duration::from_secs_f64(time_budget),
        repetitions,
        warm_up: true,
    };
    let cfg = config.0.clone();
    let rows = py
        .detach(move || analysis::bench_timing(&cfg, &ms, &dts, &settings))
        .map_err(py_err)?;
    rows_to_dicts(py, &rows)
}

type ConvergenceTuple = (String, f64, f64, Option<f64>);

/// `(method, dt, error_l1, observed_order)` tuples over `levels` halvings.
#[pyfunction]
#[pyo3(signature = (config, levels = 3, refinement = 10))]
fn convergence_study(
    py: Python<'_>,
    config: &PySolverConfig,
    levels: usize,
    refinement: usize,
) -> PyResult<Vec<ConvergenceTuple>> {
    let cfg = config.0.clone();
    let case = MethodCase::new(cfg.method, cfg.micro_m, cfg.micro_used);
    let rows = py
        .detach(move || {
            analysis::convergence_study(&cfg, &[case], cfg.dt_macro, levels, refinement)
        })
        .map_err(py_err)?;
    Ok(rows
        .into_iter()
        .map(|r| {
            (
                r.case.method.cli_name().to_string(),
                r.dt_macro,
                r.error_l1,
                r.observed_order,
            )
        })
        .collect())
}

/// Short unsplit run of the physical packet problem.
#[pyfunction]
#[pyo3(signature = (cells = 400, dt = 1e-20, steps = 100, potential = "charge-quadratic"))]
fn physical_smoke(
    py: Python<'_>,
    cells: usize,
    dt: f64,
    steps: usize,
    potential: &str,
) -> PyResult<PyRunResult> {
    let cfg = PhysicalConfig::preset(cells, dt, steps, parse(potential)?);
    cfg.validate().map_err(py_err)?;
    let result = py
        .detach(move || multisplit::cli::physical_smoke(&cfg, Snapshots::None))
        .map_err(py_err)?;
    Ok(PyRunResult(result))
}

#[pymodule]
fn multisplit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyWaveField>()?;
    m.add_class::<PySolverConfig>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(init_scaled, m)?)?;
    m.add_function(wrap_pyfunction!(eval_potential, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(l1_error, m)?)?;
    m.add_function(wrap_pyfunction!(observed_order, m)?)?;
    m.add_function(wrap_pyfunction!(thomas_solve, m)?)?;
    m.add_function(wrap_pyfunction!(extrapolate_linear, m)?)?;
    m.add_function(wrap_pyfunction!(extrapolate_quadratic, m)?)?;
    m.add_function(wrap_pyfunction!(bench_errors, m)?)?;
    m.add_function(wrap_pyfunction!(bench_timing, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_study, m)?)?;
    m.add_function(wrap_pyfunction!(physical_smoke, m)?)?;
    m.add(
        "METHODS",
        MethodId::ALL
            .iter()
            .map(|m| m.cli_name())
            .collect::<Vec<_>>(),
    )?;
    Ok(())
}
