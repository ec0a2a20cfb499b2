//! Python bindings: `import pyqtrain`.

use num_complex::Complex64;
use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;

use qtrain::classical::{self, MarkTape};
use qtrain::stats;
use qtrain::strings::{self, BitString};
use qtrain::{train, vm, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::OutOfRange(_) => PyIndexError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(name = "ProtocolParams", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyParams {
    inner: qtrain::ProtocolParams,
}

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (n_qubits, alpha=1.0))]
    fn new(n_qubits: u32, alpha: f64) -> PyResult<Self> {
        qtrain::make_params(n_qubits, alpha)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[getter]
    fn n_qubits(&self) -> u32 {
        self.inner.n_qubits()
    }

    #[getter]
    fn k_sites(&self) -> usize {
        self.inner.k_sites()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    #[getter]
    fn range(&self) -> f64 {
        self.inner.range()
    }

    #[getter]
    fn scale_m(&self) -> f64 {
        self.inner.scale_m()
    }

    fn __repr__(&self) -> String {
        format!(
            "ProtocolParams(n_qubits={}, alpha={})",
            self.inner.n_qubits(),
            self.inner.alpha()
        )
    }
}

#[pyclass(name = "ErrorDistribution", frozen, skip_from_py_object)]
struct PyDistribution {
    inner: qtrain::ErrorDistribution,
}

#[pymethods]
impl PyDistribution {
    #[getter]
    fn true_integral(&self) -> f64 {
        self.inner.true_integral
    }

    /// Probabilities indexed by outcome m.
    #[getter]
    fn probs(&self) -> Vec<f64> {
        self.inner.probs().collect()
    }

    /// Wrapped errors αm − I indexed by outcome m.
    #[getter]
    fn deltas(&self) -> Vec<f64> {
        self.inner.entries.iter().map(|e| e.delta_i).collect()
    }

    fn mode(&self) -> usize {
        self.inner.mode()
    }

    /// (std_dev, mean_abs, bias) over the wrapped errors.
    fn moments(&self) -> (f64, f64, f64) {
        let m = stats::exact_moments(&self.inner);
        (m.std_dev, m.mean_abs, m.bias)
    }

    fn __len__(&self) -> usize {
        self.inner.entries.len()
    }
}

/// Amplitudes of the particle after crossing a field with integral I.
#[pyfunction]
fn final_state(integral: f64, params: &PyParams) -> Vec<Complex64> {
    let p = &params.inner;
    train::imprint_phase(&train::prepare_uniform_state(p), integral, p).into_amplitudes()
}

#[pyfunction]
fn outcome_distribution(integral: f64, params: &PyParams) -> PyDistribution {
    PyDistribution {
        inner: train::outcome_distribution(integral, &params.inner),
    }
}

#[pyfunction]
fn vm_outcome_distribution(integral: f64, params: &PyParams) -> PyDistribution {
    PyDistribution {
        inner: vm::vm_outcome_distribution(integral, &params.inner),
    }
}

#[pyfunction]
fn closed_form_error_prob(delta_i: f64, params: &PyParams) -> f64 {
    train::closed_form_error_prob(delta_i, &params.inner)
}

#[pyfunction]
fn product_form_error_prob(delta_i: f64, params: &PyParams) -> f64 {
    vm::product_form_error_prob(delta_i, &params.inner)
}

/// Draws `trials` outcomes m with a seeded generator.
#[pyfunction]
fn sample_outcomes(dist: &PyDistribution, trials: usize, seed: u64) -> Vec<usize> {
    let sampler = train::OutcomeSampler::new(&dist.inner);
    let mut rng = qtrain::seeded_rng(seed, 1);
    (0..trials).map(|_| sampler.sample(&mut rng).m).collect()
}

/// (delta, mean_abs) from the asymptotic quantum formulas.
#[pyfunction]
fn asymptotic_quantum_uncertainty(params: &PyParams) -> (f64, f64) {
    let a = stats::asymptotic_quantum_uncertainty(&params.inner);
    (a.delta, a.mean_abs)
}

/// (std_dev, mean_abs, bias) averaged over `count` sub-α offsets from `base`.
#[pyfunction]
fn offset_averaged_moments(params: &PyParams, base: f64, count: usize) -> PyResult<(f64, f64, f64)> {
    let m = stats::offset_averaged_moments(&params.inner, base, count).map_err(to_py)?;
    Ok((m.std_dev, m.mean_abs, m.bias))
}

/// Final ripple-counter bits, least significant first, for `count` marks.
#[pyfunction]
fn ripple_count(count: usize, n_bits: u32) -> Vec<bool> {
    classical::ripple_count_marks(&MarkTape::with_count(count), n_bits).bits
}

/// Canonical JSON of the quantum-vs-counter comparison.
#[pyfunction]
fn compare(integral: f64, params: &PyParams, trials: usize, seed: u64) -> PyResult<String> {
    let report = stats::compare_integral(integral, &params.inner, trials, seed).map_err(to_py)?;
    qtrain::json::to_canonical_string(&report).map_err(to_py)
}

#[pyfunction]
fn special_strings(n: u32) -> PyResult<Vec<String>> {
    let set = strings::special_strings(n).map_err(to_py)?;
    Ok(set.strings().iter().map(|s| s.to_string()).collect())
}

/// Imprints `bits` on the uniform particle and returns the 1-based index of
/// the special string it matches.
#[pyfunction]
fn decode_bits(n: u32, bits: &str) -> PyResult<usize> {
    let set = strings::special_strings(n).map_err(to_py)?;
    let params = qtrain::make_params(n, 1.0).map_err(to_py)?;
    let bits = BitString::parse(bits).map_err(to_py)?;
    let state = strings::imprint_string(&train::prepare_uniform_state(&params), &bits).map_err(to_py)?;
    strings::decode_string(&state, &set)
        .map(|d| d.index)
        .map_err(to_py)
}

#[pyfunction]
fn integrate_field_spec(spec: &str) -> PyResult<f64> {
    qtrain::field::parse_field_spec(spec)
        .map(|f| qtrain::integrate_field(&f))
        .map_err(to_py)
}

#[pymodule]
fn pyqtrain(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}

/// Adds every class and function to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyDistribution>()?;
    m.add_function(wrap_pyfunction!(final_state, m)?)?;
    m.add_function(wrap_pyfunction!(outcome_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(vm_outcome_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_error_prob, m)?)?;
    m.add_function(wrap_pyfunction!(product_form_error_prob, m)?)?;
    m.add_function(wrap_pyfunction!(sample_outcomes, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_quantum_uncertainty, m)?)?;
    m.add_function(wrap_pyfunction!(offset_averaged_moments, m)?)?;
    m.add_function(wrap_pyfunction!(ripple_count, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(special_strings, m)?)?;
    m.add_function(wrap_pyfunction!(decode_bits, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_field_spec, m)?)?;
    Ok(())
}
