//! Python bindings: `import ipdsaw_py`.
//!
//! Build the importable module with
//! `maturin develop -m crates/python/Cargo.toml --features extension-module`.

use ipdsaw::exact::{self, ExactSampler};
use ipdsaw::experiments;
use ipdsaw::mc::{self, RngStream};
use ipdsaw::polymer::{self, PolymerPath};
use ipdsaw::thermo;
use ipdsaw::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(_) | Error::InvalidPath(_) | Error::MalformedWalk(_) | Error::Domain(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// A polymer configuration given by its vertical stretches.
#[pyclass(name = "Path", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyPath {
    inner: PolymerPath,
}

#[pymethods]
impl PyPath {
    #[new]
    fn new(stretches: Vec<i64>) -> PyResult<Self> {
        Ok(Self {
            inner: PolymerPath::new(stretches).map_err(py_err)?,
        })
    }

    #[getter]
    fn stretches(&self) -> Vec<i64> {
        self.inner.stretches().to_vec()
    }

    #[getter]
    fn extension(&self) -> usize {
        self.inner.extension()
    }

    #[getter]
    fn length(&self) -> usize {
        self.inner.total_length()
    }

    /// Number of self-touching contacts.
    fn interaction(&self) -> u64 {
        self.inner.interaction()
    }

    fn hamiltonian(&self, beta: f64) -> f64 {
        self.inner.hamiltonian(beta)
    }

    /// Values `V_0..V_{N+1}` of the auxiliary walk.
    fn aux_walk(&self) -> Vec<i64> {
        polymer::to_aux_walk(&self.inner).values().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.extension()
    }

    fn __repr__(&self) -> String {
        format!("Path({:?})", self.inner.stretches())
    }
}

/// Constants attached to an inverse temperature.
#[pyclass(name = "ModelParams", frozen, get_all)]
pub struct PyModelParams {
    beta: f64,
    x: f64,
    c_beta: f64,
    gamma_beta: f64,
}

#[pymethods]
impl PyModelParams {
    #[new]
    fn new(beta: f64) -> PyResult<Self> {
        let p = thermo::ModelParams::new(beta).map_err(py_err)?;
        Ok(Self {
            beta: p.beta,
            x: p.x,
            c_beta: p.c_beta,
            gamma_beta: p.gamma_beta,
        })
    }

    fn __repr__(&self) -> String {
        format!("ModelParams(beta={}, gamma_beta={})", self.beta, self.gamma_beta)
    }
}

#[pyclass(name = "WulffShape", frozen)]
pub struct PyWulffShape {
    inner: thermo::WulffShape,
}

#[pymethods]
impl PyWulffShape {
    #[new]
    fn new(beta: f64, q: f64) -> PyResult<Self> {
        Ok(Self {
            inner: thermo::WulffShape::new(beta, q).map_err(py_err)?,
        })
    }

    /// `(h0, h1)`.
    #[getter]
    fn tilt(&self) -> (f64, f64) {
        (self.inner.tilt.h0, self.inner.tilt.h1)
    }

    fn profile(&self, t: f64) -> PyResult<f64> {
        self.inner.profile(t).map_err(py_err)
    }

    fn envelope(&self, t: f64) -> PyResult<f64> {
        self.inner.envelope(t).map_err(py_err)
    }

    fn area(&self) -> PyResult<f64> {
        self.inner.area().map_err(py_err)
    }
}

/// Exact sampler for lengths up to `l_max`.
#[pyclass(name = "ExactSampler", frozen)]
pub struct PyExactSampler {
    inner: ExactSampler,
}

#[pymethods]
impl PyExactSampler {
    #[new]
    fn new(py: Python<'_>, beta: f64, l_max: usize) -> PyResult<Self> {
        let inner = py.detach(|| ExactSampler::new(beta, l_max)).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Extension law `P(N = n)`, `n = 0..=L`.
    fn extension_law(&self, length: usize) -> PyResult<Vec<f64>> {
        if length == 0 || length > self.inner.l_max {
            return Err(PyValueError::new_err("length outside 1..=l_max"));
        }
        Ok(self.inner.law(length).probs.clone())
    }

    #[pyo3(signature = (length, count, seed=0))]
    fn sample(&self, py: Python<'_>, length: usize, count: usize, seed: u64) -> PyResult<Vec<PyPath>> {
        let s = &self.inner;
        let paths = py.detach(|| {
            mc::replicate(seed, 0, count, |_, rng| s.sample(length, rng))
                .into_iter()
                .collect::<ipdsaw::Result<Vec<_>>>()
        });
        Ok(paths.map_err(py_err)?.into_iter().map(|inner| PyPath { inner }).collect())
    }
}

#[pyfunction]
fn beta_c() -> f64 {
    thermo::beta_c()
}

/// `log Z̃_L`.
#[pyfunction]
fn log_excess_partition(beta: f64, length: usize) -> PyResult<f64> {
    exact::excess_partition(beta, length).map_err(py_err)
}

/// `Z_L e^{−βL}` by enumerating every configuration (L ≤ 12 or so).
#[pyfunction]
fn enumerate_excess_partition(beta: f64, length: usize) -> PyResult<f64> {
    Ok(polymer::enumerate_z(length, beta).map_err(py_err)?.excess())
}

#[pyfunction]
fn extension_law(py: Python<'_>, beta: f64, length: usize) -> PyResult<Vec<f64>> {
    let law = py.detach(|| exact::extension_law(beta, length)).map_err(py_err)?;
    Ok(law.probs)
}

/// `(h0, h1)` solving the area constraint at `q`.
#[pyfunction]
fn solve_tilt(beta: f64, q: f64) -> PyResult<(f64, f64)> {
    let t = thermo::solve_tilt(beta, q).map_err(py_err)?;
    Ok((t.h0, t.h1))
}

/// Perfect samples at the critical point, returned with their trial counts.
#[pyfunction]
#[pyo3(signature = (length, count, seed=0, max_trials=1 << 40))]
fn perfect_samples(
    py: Python<'_>,
    length: usize,
    count: usize,
    seed: u64,
    max_trials: u64,
) -> PyResult<Vec<(PyPath, u64)>> {
    let draws = py.detach(|| {
        mc::replicate(seed, 0, count, |_, rng| mc::perfect_critical_sample(length, rng, max_trials))
            .into_iter()
            .collect::<ipdsaw::Result<Vec<_>>>()
    });
    Ok(draws
        .map_err(py_err)?
        .into_iter()
        .map(|s| (PyPath { inner: s.path }, s.trials))
        .collect())
}

/// One value of the two-sided geometric increment law, for quick checks.
#[pyfunction]
#[pyo3(signature = (beta, seed=0))]
fn sample_increment(beta: f64, seed: u64) -> PyResult<i64> {
    let mut rng = RngStream::new(seed, 0);
    mc::sample_increment(beta, &mut rng).map_err(py_err)
}

/// Runs a registry experiment and returns its report as a JSON string.
#[pyfunction]
#[pyo3(signature = (name, seed=0, quick=true))]
fn run_experiment(py: Python<'_>, name: &str, seed: u64, quick: bool) -> PyResult<String> {
    let mut params = experiments::ExperimentParams::seeded(seed);
    params.quick = quick;
    let report = py.detach(|| experiments::run(name, &params)).map_err(py_err)?;
    report.to_json().map_err(py_err)
}

/// Runs one acceptance item; returns `(passed, text)`.
#[pyfunction]
#[pyo3(signature = (id, seed=0))]
fn run_acceptance(py: Python<'_>, id: &str, seed: u64) -> PyResult<(bool, String)> {
    let r = py.detach(|| experiments::run_acceptance(id, seed)).map_err(py_err)?;
    Ok((r.passed(), r.to_string()))
}

#[pymodule]
fn ipdsaw_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPath>()?;
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyWulffShape>()?;
    m.add_class::<PyExactSampler>()?;
    m.add_function(wrap_pyfunction!(beta_c, m)?)?;
    m.add_function(wrap_pyfunction!(log_excess_partition, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_excess_partition, m)?)?;
    m.add_function(wrap_pyfunction!(extension_law, m)?)?;
    m.add_function(wrap_pyfunction!(solve_tilt, m)?)?;
    m.add_function(wrap_pyfunction!(perfect_samples, m)?)?;
    m.add_function(wrap_pyfunction!(sample_increment, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(run_acceptance, m)?)?;
    m.add("EXPERIMENTS", experiments::EXPERIMENTS.to_vec())?;
    Ok(())
}
