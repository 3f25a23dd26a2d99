//! Python bindings: `import normcell_py`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use normcell::acf::{ou_limit_curve, phase_acf_analytic, time_acf_closed_form};
use normcell::dynamics::{energy, evolve, momentum_trajectory_coefficients};
use normcell::ensemble::{ensemble_acf, khintchine_identity_check, normal_cell_fraction, variance_scaling};
use normcell::sampling::{sample_energy_shell, sample_maxwell_boltzmann, ShellSpec};
use normcell::{AssemblyConfig, FrequencyLaw, Normalization, PhaseState, SamplerKind, TauGrid, TrigSeries, TrigTerm};

fn py_err(e: normcell::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn sampler_kind(name: &str) -> PyResult<SamplerKind> {
    match name {
        "shell" => Ok(SamplerKind::Shell),
        "maxwell" => Ok(SamplerKind::MaxwellBoltzmann),
        other => Err(PyValueError::new_err(format!("unknown sampler {other:?}; use 'shell' or 'maxwell'"))),
    }
}

fn normalization(unit: bool) -> Normalization {
    if unit {
        Normalization::UnitAtZero
    } else {
        Normalization::Raw
    }
}

/// A finite chain of `2N+1` oscillators with its spectrum and energy shell.
#[pyclass(name = "Assembly", frozen)]
struct PyAssembly {
    inner: normcell::ensemble::Assembly,
}

#[pymethods]
impl PyAssembly {
    #[new]
    #[pyo3(signature = (half_size, temperature=1.0, mass=1.0, cutoff_cap=None, frequencies=None, energy=None))]
    fn new(
        half_size: usize,
        temperature: f64,
        mass: f64,
        cutoff_cap: Option<f64>,
        frequencies: Option<Vec<f64>>,
        energy: Option<f64>,
    ) -> PyResult<Self> {
        let config = AssemblyConfig {
            half_size,
            mass,
            temperature,
            frequency_law: frequencies.map_or(FrequencyLaw::Tangent, FrequencyLaw::Explicit),
            cutoff_cap,
            rng_seed: 0,
        };
        config.validate().map_err(py_err)?;
        let shell = match energy {
            Some(e) => ShellSpec::new(e),
            None => ShellSpec::most_probable(half_size, temperature),
        }
        .map_err(py_err)?;
        let inner = normcell::ensemble::Assembly::with_shell(config, shell).map_err(py_err)?;
        Ok(PyAssembly { inner })
    }

    #[getter]
    fn half_size(&self) -> usize {
        self.inner.config.half_size
    }

    #[getter]
    fn temperature(&self) -> f64 {
        self.inner.config.temperature
    }

    #[getter]
    fn energy(&self) -> f64 {
        self.inner.shell.energy()
    }

    /// Frequencies `omega_k` for `k = -N..N`.
    fn frequencies(&self) -> Vec<f64> {
        self.inner.spectrum.frequencies().to_vec()
    }

    #[pyo3(signature = (tau_step=0.1, tau_count=51, unit=false))]
    fn phase_acf(&self, tau_step: f64, tau_count: usize, unit: bool) -> PyResult<Vec<f64>> {
        let grid = TauGrid::new(tau_step, tau_count).map_err(py_err)?;
        let curve = phase_acf_analytic(&self.inner.spectrum, self.inner.config.temperature, grid).map_err(py_err)?;
        Ok(curve.normalized(normalization(unit)).values)
    }

    /// One sampled phase point `(p, q)`.
    #[pyo3(signature = (sampler="shell", seed=0))]
    fn sample(&self, sampler: &str, seed: u64) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let state = match sampler_kind(sampler)? {
            SamplerKind::Shell => sample_energy_shell(&self.inner.spectrum, &self.inner.shell, seed),
            SamplerKind::MaxwellBoltzmann => {
                sample_maxwell_boltzmann(&self.inner.spectrum, self.inner.config.temperature, seed)
            }
        }
        .map_err(py_err)?;
        Ok((state.p, state.q))
    }

    /// Exact state at time `t`.
    fn evolve(&self, p: Vec<f64>, q: Vec<f64>, t: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let state = PhaseState::new(p, q).map_err(py_err)?;
        let later = evolve(&state, &self.inner.spectrum, t).map_err(py_err)?;
        Ok((later.p, later.q))
    }

    fn hamiltonian(&self, p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
        let state = PhaseState::new(p, q).map_err(py_err)?;
        energy(&state, &self.inner.spectrum).map_err(py_err)
    }

    /// Closed-form time autocorrelation of `p0` along the trajectory from `(p, q)`.
    #[pyo3(signature = (p, q, tau_step=0.1, tau_count=51, unit=false))]
    fn trajectory_acf(&self, p: Vec<f64>, q: Vec<f64>, tau_step: f64, tau_count: usize, unit: bool) -> PyResult<Vec<f64>> {
        let state = PhaseState::new(p, q).map_err(py_err)?;
        let series = momentum_trajectory_coefficients(&state, &self.inner.spectrum).map_err(py_err)?;
        let grid = TauGrid::new(tau_step, tau_count).map_err(py_err)?;
        Ok(time_acf_closed_form(&series, grid).normalized(normalization(unit)).values)
    }

    /// Ensemble mean, variance and Khintchine z-scores of member autocorrelations.
    #[pyo3(signature = (samples, seed=0, sampler="shell", tau_step=0.1, tau_count=51))]
    fn ensemble<'py>(
        &self,
        py: Python<'py>,
        samples: usize,
        seed: u64,
        sampler: &str,
        tau_step: f64,
        tau_count: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let grid = TauGrid::new(tau_step, tau_count).map_err(py_err)?;
        let kind = sampler_kind(sampler)?;
        let stats = py
            .detach(|| ensemble_acf(&self.inner, kind, samples, grid, seed))
            .map_err(py_err)?;
        let analytic = phase_acf_analytic(&self.inner.spectrum, self.inner.config.temperature, grid).map_err(py_err)?;
        let z = khintchine_identity_check(&stats, &analytic).map_err(py_err)?;
        let out = PyDict::new(py);
        out.set_item("tau", grid.points().collect::<Vec<_>>())?;
        out.set_item("mean", stats.mean)?;
        out.set_item("variance", stats.variance)?;
        out.set_item("analytic", analytic.values)?;
        out.set_item("z", z)?;
        out.set_item("sample_count", samples)?;
        out.set_item("seed", seed)?;
        Ok(out)
    }

    /// Fraction of shell trajectories leaving the epsilon band on `[0, window]`.
    #[pyo3(signature = (epsilon=0.05, window=5.0, mesh_width=None, samples=200, seed=0))]
    fn normal_cell<'py>(
        &self,
        py: Python<'py>,
        epsilon: f64,
        window: f64,
        mesh_width: Option<f64>,
        samples: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let width = mesh_width.unwrap_or(epsilon / 2.0);
        let r = py
            .detach(|| normal_cell_fraction(&self.inner, epsilon, window, width, samples, seed))
            .map_err(py_err)?;
        let out = PyDict::new(py);
        out.set_item("deviating_fraction", r.deviating_fraction)?;
        out.set_item("limit_deviating_fraction", r.limit_deviating_fraction)?;
        out.set_item("chebyshev_bound", r.chebyshev_bound)?;
        out.set_item("target_limit_gap", r.target_limit_gap)?;
        out.set_item("mesh_points", r.mesh_points)?;
        out.set_item("per_tau_deviations", r.per_tau_deviations)?;
        out.set_item("per_tau_limit_deviations", r.per_tau_limit_deviations)?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!(
            "Assembly(half_size={}, temperature={}, energy={})",
            self.inner.config.half_size,
            self.inner.config.temperature,
            self.inner.shell.energy()
        )
    }
}

/// The limit curve `pi e^{-tau}` (or `e^{-tau}` with `unit=True`).
#[pyfunction]
#[pyo3(signature = (tau_step=0.1, tau_count=51, unit=false))]
fn ou_limit(tau_step: f64, tau_count: usize, unit: bool) -> PyResult<Vec<f64>> {
    let grid = TauGrid::new(tau_step, tau_count).map_err(py_err)?;
    Ok(ou_limit_curve(grid, normalization(unit)).values)
}

/// Time autocorrelation of `sum_j a_j cos(w_j t) + b_j sin(w_j t)` given
/// `(w, a, b)` triples.
#[pyfunction]
#[pyo3(signature = (terms, tau_step=0.1, tau_count=51))]
fn trig_acf(terms: Vec<(f64, f64, f64)>, tau_step: f64, tau_count: usize) -> PyResult<Vec<f64>> {
    let series = TrigSeries::merged(terms.into_iter().map(|(w, a, b)| TrigTerm::new(w, a, b)).collect())
        .map_err(py_err)?;
    let grid = TauGrid::new(tau_step, tau_count).map_err(py_err)?;
    Ok(time_acf_closed_form(&series, grid).values)
}

/// Variance of `phi(tau)` across chain sizes with its log-log slope.
#[pyfunction]
#[pyo3(signature = (half_sizes, tau=1.0, samples=200, seed=0, temperature=1.0))]
fn variance_scaling_fit<'py>(
    py: Python<'py>,
    half_sizes: Vec<usize>,
    tau: f64,
    samples: usize,
    seed: u64,
    temperature: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let base = AssemblyConfig::tangent(1).with_temperature(temperature);
    let fit = py
        .detach(|| variance_scaling(&base, &half_sizes, tau, samples, seed))
        .map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("half_sizes", &fit.half_sizes)?;
    out.set_item("variances", &fit.variances)?;
    out.set_item("slope", fit.slope)?;
    out.set_item("intercept", fit.intercept)?;
    out.set_item("reference_constant", fit.reference_constant())?;
    Ok(out)
}

#[pymodule]
fn normcell_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAssembly>()?;
    m.add_function(wrap_pyfunction!(ou_limit, m)?)?;
    m.add_function(wrap_pyfunction!(trig_acf, m)?)?;
    m.add_function(wrap_pyfunction!(variance_scaling_fit, m)?)?;
    Ok(())
}
