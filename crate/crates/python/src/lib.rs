//! Python bindings.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use delay_apt::analysis::{self as an, AnalysisError};
use delay_apt::cli;
use delay_apt::models::{self as md, ModelError};
use delay_apt::special::{self, WBranch};
use delay_apt::spectral::{self as sp, SpectralError, SweepVariant};

fn variant(name: &str) -> PyResult<SweepVariant> {
    SweepVariant::parse(name).ok_or_else(|| PyValueError::new_err(format!("unknown variant `{name}`")))
}

fn spectral_err(e: SpectralError) -> PyErr {
    match e {
        SpectralError::InvalidParams(_) | SpectralError::InvalidWindow(_) | SpectralError::WrongVariant => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn model_err(e: ModelError) -> PyErr {
    match e {
        ModelError::InvalidParams(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn analysis_err(e: AnalysisError) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// Lambert W on branch 0 or -1.
#[pyfunction]
#[pyo3(signature = (x, branch = 0))]
fn lambert_w(x: f64, branch: i32) -> PyResult<f64> {
    let b = WBranch::from_index(branch).ok_or_else(|| PyValueError::new_err("branch must be 0 or -1"))?;
    special::lambert_w(b, x).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// One instance of the delayed two-mode Liouvillian.
#[pyclass(name = "SpectralParams", from_py_object)]
#[derive(Clone)]
struct PySpectralParams {
    inner: sp::SpectralParams,
}

#[pymethods]
impl PySpectralParams {
    #[new]
    #[pyo3(signature = (kappa, tau, delta_omega = 0.0, variant = "symmetric", omega_fixed = 0.0))]
    fn new(kappa: f64, tau: f64, delta_omega: f64, variant: &str, omega_fixed: f64) -> PyResult<Self> {
        let v = self::variant(variant)?;
        let inner = sp::SpectralParams::new(delta_omega, kappa, tau, v, omega_fixed).map_err(spectral_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa
    }

    #[getter]
    fn tau(&self) -> f64 {
        self.inner.tau
    }

    #[getter]
    fn delta_omega(&self) -> f64 {
        self.inner.delta_omega
    }

    #[getter]
    fn variant(&self) -> &'static str {
        self.inner.variant.name()
    }

    /// Roots in the default window as `(u, v, residual)`, largest `u` first.
    fn eigenvalues(&self) -> PyResult<Vec<(f64, f64, f64)>> {
        let w = sp::SearchWindow::default_for(&self.inner);
        let roots = sp::find_eigenvalues(&self.inner, &w).map_err(spectral_err)?;
        Ok(roots.iter().map(|r| (r.u, r.v, r.residual)).collect())
    }

    fn dominant_rate(&self) -> PyResult<f64> {
        sp::dominant_rate(&self.inner, &sp::SearchWindow::default_for(&self.inner)).map_err(spectral_err)
    }

    /// Dominant rate at each detuning of `grid`.
    fn rate_curve(&self, grid: Vec<f64>) -> PyResult<Vec<f64>> {
        sp::dominant_rate_curve(&self.inner, &grid).map_err(spectral_err)
    }

    /// Complex residual of the characteristic equation at `lam`.
    fn residual(&self, lam: Complex64) -> Complex64 {
        sp::char_residual(lam, &self.inner)
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "SpectralParams(kappa={}, tau={}, delta_omega={}, variant='{}', omega_fixed={})",
            p.kappa, p.tau, p.delta_omega, p.variant, p.omega_fixed
        )
    }
}

#[pyfunction]
fn markovian_eigenvalues(kappa: f64, delta_omega: f64) -> (Complex64, Complex64) {
    sp::markovian_eigenvalues(kappa, delta_omega)
}

#[pyfunction]
fn g_double_zeros(kappa: f64, tau: f64) -> Option<(f64, f64)> {
    sp::g_double_zeros(kappa, tau)
}

#[pyfunction]
fn central_dome_rate(kappa: f64, tau: f64, delta_omega: f64) -> Option<f64> {
    sp::central_dome_rate(kappa, tau, delta_omega)
}

/// `[(n, Δω_n)]` for even `n` up to `n_max`.
#[pyfunction]
fn transition_detunings(kappa: f64, tau: f64, n_max: u32) -> Vec<(u32, f64)> {
    sp::transition_detunings(kappa, tau, n_max)
}

#[pyfunction]
#[pyo3(signature = (kappa, tau, n, variant = "symmetric"))]
fn sow_predicted(kappa: f64, tau: f64, n: u32, variant: &str) -> PyResult<f64> {
    Ok(sp::sow_predicted(kappa, tau, n, self::variant(variant)?))
}

/// Lang-Kobayashi parameters with the coupling given as a rate.
#[pyclass(name = "LkParams", from_py_object)]
#[derive(Clone)]
struct PyLkParams {
    inner: md::LkParams,
}

#[pymethods]
impl PyLkParams {
    #[new]
    #[pyo3(signature = (kappa = 0.0, tau = 0.0, delta_omega = 0.0, variant = "symmetric", omega_fixed = 0.0))]
    fn new(kappa: f64, tau: f64, delta_omega: f64, variant: &str, omega_fixed: f64) -> PyResult<Self> {
        let inner = md::LkParams {
            omega_fixed,
            ..md::LkParams::with_coupling(kappa, tau, delta_omega, self::variant(variant)?)
        };
        inner.validate().map_err(model_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa()
    }

    #[setter]
    fn set_kappa(&mut self, v: f64) {
        self.inner.set_kappa(v)
    }

    #[getter]
    fn tau(&self) -> f64 {
        self.inner.tau
    }

    #[setter]
    fn set_tau(&mut self, v: f64) {
        self.inner.tau = v
    }

    #[getter]
    fn delta_omega(&self) -> f64 {
        self.inner.delta_omega
    }

    #[setter]
    fn set_delta_omega(&mut self, v: f64) {
        self.inner.delta_omega = v
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[setter]
    fn set_alpha(&mut self, v: f64) {
        self.inner.alpha = v
    }

    #[getter]
    fn gain(&self) -> f64 {
        self.inner.gain
    }

    #[setter]
    fn set_gain(&mut self, v: f64) {
        self.inner.gain = v
    }

    fn set_pump_ratio(&mut self, ratio: f64) {
        self.inner.set_pump_ratio(ratio)
    }

    fn solitary_intensity(&self) -> f64 {
        self.inner.solitary_intensity(self.inner.pump1)
    }

    /// Right-hand side at state `[reE1, imE1, reE2, imE2, N1, N2]` with the
    /// delayed state `delayed`.
    fn rhs(&self, state: [f64; 6], delayed: [f64; 6]) -> [f64; 6] {
        let s = md::LkState::from_slice(&state);
        let d = md::LkState::from_slice(&delayed);
        md::lk_rhs(0.0, &s, &d, &self.inner).to_array()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

fn run_settings(
    h: f64,
    transient: f64,
    retained: f64,
    window: f64,
    averaging: &str,
    seed: u64,
) -> PyResult<md::RunSettings> {
    let averaging = md::Averaging::parse(averaging)
        .ok_or_else(|| PyValueError::new_err(format!("unknown averaging `{averaging}`")))?;
    let r = md::RunSettings { h, transient, retained, window, averaging, seed, ..md::RunSettings::default() };
    r.validate().map_err(model_err)?;
    Ok(r)
}

/// Averaged intensities `(I1, I2, converged)` of one run.
#[pyfunction]
#[pyo3(signature = (params, h = 1e-4, transient = 50.0, retained = 10.0, window = 1.0, averaging = "boxcar", seed = 0))]
fn steady_state_intensity(
    py: Python<'_>,
    params: PyLkParams,
    h: f64,
    transient: f64,
    retained: f64,
    window: f64,
    averaging: &str,
    seed: u64,
) -> PyResult<(f64, f64, bool)> {
    let run = run_settings(h, transient, retained, window, averaging, seed)?;
    let s = py
        .detach(|| md::steady_state_intensity(&params.inner, &run))
        .map_err(model_err)?;
    Ok((s.i1, s.i2, s.converged))
}

/// Steady-state intensities over a detuning grid.
#[pyclass(name = "SweepProfile", from_py_object)]
#[derive(Clone)]
struct PySweepProfile {
    inner: an::SweepProfile,
}

#[pymethods]
impl PySweepProfile {
    /// Builds a profile from arrays, e.g. to analyse external data.
    #[new]
    #[pyo3(signature = (delta_omega, i1, i2, kappa, tau, variant = "symmetric"))]
    fn new(delta_omega: Vec<f64>, i1: Vec<f64>, i2: Vec<f64>, kappa: f64, tau: f64, variant: &str) -> PyResult<Self> {
        let inner = an::SweepProfile::new(delta_omega, i1, i2, kappa, tau, self::variant(variant)?);
        inner.validate().map_err(analysis_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn delta_omega(&self) -> Vec<f64> {
        self.inner.delta_omega.clone()
    }

    #[getter]
    fn i1(&self) -> Vec<f64> {
        self.inner.i1.clone()
    }

    #[getter]
    fn i2(&self) -> Vec<f64> {
        self.inner.i2.clone()
    }

    #[getter]
    fn i1_norm(&self) -> Option<Vec<f64>> {
        self.inner.i1_norm.clone()
    }

    #[getter]
    fn converged(&self) -> Vec<bool> {
        self.inner.converged.clone()
    }

    fn failures(&self) -> usize {
        self.inner.failures()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn normalized(&self) -> PyResult<Self> {
        an::normalize_profile(&self.inner).map(|inner| Self { inner }).map_err(analysis_err)
    }

    fn dome_edge(&self) -> f64 {
        an::dome_edge(&self.inner)
    }

    /// `(sow, fwhm_error, n_sidebands_used, dome_edge)`.
    fn extract_sow(&self) -> PyResult<(f64, f64, usize, f64)> {
        let e = an::extract_sow(&self.inner).map_err(analysis_err)?;
        Ok((e.value, e.fwhm_error, e.n_sidebands_used, e.dome_edge))
    }
}

/// Runs `params` at every detuning of `grid` and returns the normalised
/// profile when the grid is wide enough.
#[pyfunction]
#[pyo3(signature = (params, grid, h = 1e-4, transient = 50.0, retained = 10.0, window = 1.0, averaging = "boxcar", seed = 0))]
#[allow(clippy::too_many_arguments)]
fn sweep_detuning(
    py: Python<'_>,
    params: PyLkParams,
    grid: Vec<f64>,
    h: f64,
    transient: f64,
    retained: f64,
    window: f64,
    averaging: &str,
    seed: u64,
) -> PyResult<PySweepProfile> {
    let run = run_settings(h, transient, retained, window, averaging, seed)?;
    params.inner.validate().map_err(model_err)?;
    let prof = py.detach(|| md::sweep_detuning(&params.inner, &grid, params.inner.variant, &run));
    let inner = an::normalize_profile(&prof).unwrap_or(prof);
    Ok(PySweepProfile { inner })
}

/// Runs the command-line front end on config text; returns the written files.
#[pyfunction]
#[pyo3(signature = (config, mode = None, overrides = Vec::new()))]
fn run_config(py: Python<'_>, config: &str, mode: Option<&str>, overrides: Vec<String>) -> PyResult<Vec<String>> {
    let cfg = cli::parse_config(config, mode, &overrides, &[]).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let summary = py.detach(|| cli::run(&cfg)).map_err(|e| match e {
        cli::RunError::Config(c) => PyValueError::new_err(c.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    })?;
    Ok(summary.files.iter().map(|p| p.display().to_string()).collect())
}

#[pymodule]
fn delay_apt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpectralParams>()?;
    m.add_class::<PyLkParams>()?;
    m.add_class::<PySweepProfile>()?;
    m.add_function(wrap_pyfunction!(lambert_w, m)?)?;
    m.add_function(wrap_pyfunction!(markovian_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(g_double_zeros, m)?)?;
    m.add_function(wrap_pyfunction!(central_dome_rate, m)?)?;
    m.add_function(wrap_pyfunction!(transition_detunings, m)?)?;
    m.add_function(wrap_pyfunction!(sow_predicted, m)?)?;
    m.add_function(wrap_pyfunction!(steady_state_intensity, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_detuning, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
