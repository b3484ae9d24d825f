//! Python bindings. Matrices cross the boundary as nested lists of `complex`,
//! states as flat lists; energies are in natural units unless the name ends
//! in `_h`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use vnmeas::cli::{cmd_reproduce, cmd_run, ScenarioConfig};
use vnmeas::collapse::{self, EnergyLedger};
use vnmeas::{dynamics, operator, ComplexMatrix, MeasurementScheme, PointerBasis, PureState, QubitBasis};

create_exception!(vnmeas, VnmeasError, PyValueError);

type Rows = Vec<Vec<Complex64>>;

fn py_err(e: impl std::fmt::Display) -> PyErr {
    VnmeasError::new_err(e.to_string())
}

fn to_matrix(rows: Rows) -> PyResult<ComplexMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(py_err("expected a non-empty square matrix"));
    }
    let flat: Vec<Complex64> = rows.into_iter().flatten().collect();
    Ok(ComplexMatrix::from_row_slice(n, &flat))
}

fn to_rows(m: &ComplexMatrix) -> Rows {
    m.to_rows()
}

#[pyfunction]
fn standard_hamiltonian() -> Rows {
    to_rows(&vnmeas::standard::hamiltonian())
}

#[pyfunction]
fn standard_unitary() -> Rows {
    to_rows(&vnmeas::standard::unitary())
}

/// `exp(-i H t)`.
#[pyfunction]
fn unitary_exp(h: Rows, t: f64) -> PyResult<Rows> {
    let u = operator::unitary_exp(&to_matrix(h)?, t).map_err(py_err)?;
    Ok(to_rows(&u))
}

/// Hermitian `H` with `exp(-iH) = U`, eigen-energies in (−π, π].
#[pyfunction]
fn principal_log_hamiltonian(u: Rows) -> PyResult<Rows> {
    let h = operator::principal_log_hamiltonian(&to_matrix(u)?).map_err(py_err)?;
    Ok(to_rows(&h))
}

#[pyfunction]
fn commutator(a: Rows, b: Rows) -> PyResult<Rows> {
    let c = operator::commutator(&to_matrix(a)?, &to_matrix(b)?).map_err(py_err)?;
    Ok(to_rows(&c))
}

#[pyfunction]
fn tensor_product(a: Rows, b: Rows) -> PyResult<Rows> {
    Ok(to_rows(&operator::tensor_product(&to_matrix(a)?, &to_matrix(b)?)))
}

/// Two-letter labels ("XY", ...) to real coefficients.
#[pyfunction]
fn pauli_decompose(h: Rows) -> PyResult<BTreeMap<String, f64>> {
    let d = vnmeas::pauli_decompose(&to_matrix(h)?).map_err(py_err)?;
    Ok(d.labeled().collect())
}

#[pyfunction]
fn pauli_compose(terms: BTreeMap<String, f64>) -> PyResult<Rows> {
    let mut d = vnmeas::PauliDecomposition::zero();
    for (label, c) in terms {
        let (a, b) = vnmeas::PauliDecomposition::parse_label(&label)
            .ok_or_else(|| py_err(format!("unknown Pauli label {label:?}")))?;
        d.set(a, b, d.get(a, b) + c);
    }
    Ok(to_rows(&vnmeas::pauli_compose(&d)))
}

#[pyfunction]
fn qnd_extend(h_sp: Rows, h_env: Rows, h_int: Rows) -> PyResult<Rows> {
    let h = collapse::qnd_extend(&to_matrix(h_sp)?, &to_matrix(h_env)?, &to_matrix(h_int)?).map_err(py_err)?;
    Ok(to_rows(&h))
}

/// Runs the reference reproduction and returns the JSON report.
#[pyfunction]
fn reproduce() -> PyResult<String> {
    Ok(cmd_reproduce().map_err(py_err)?.to_json())
}

/// Same as the `run` subcommand, on a JSON configuration string.
#[pyfunction]
fn run_config(config: &str) -> PyResult<String> {
    let cfg = ScenarioConfig::from_json_str(config).map_err(py_err)?;
    Ok(cmd_run(&cfg).map_err(py_err)?.to_json())
}

#[pyclass(name = "Ledger", frozen)]
struct PyLedger {
    #[pyo3(get)]
    t_collapse: f64,
    #[pyo3(get)]
    e_pre: f64,
    #[pyo3(get)]
    e_post: f64,
    #[pyo3(get)]
    cross: f64,
    #[pyo3(get)]
    delta: f64,
    #[pyo3(get)]
    probabilities: Vec<f64>,
}

impl From<&EnergyLedger> for PyLedger {
    fn from(l: &EnergyLedger) -> Self {
        PyLedger {
            t_collapse: l.t_collapse,
            e_pre: l.e_pre,
            e_post: l.e_post,
            cross: l.cross,
            delta: l.delta,
            probabilities: l.outcomes.iter().map(|o| o.probability).collect(),
        }
    }
}

#[pymethods]
impl PyLedger {
    #[getter]
    fn delta_h(&self) -> f64 {
        vnmeas::units::to_h(self.delta)
    }

    #[getter]
    fn e_post_h(&self) -> f64 {
        vnmeas::units::to_h(self.e_post)
    }

    fn __repr__(&self) -> String {
        format!(
            "Ledger(t={}, e_pre={:.6e}, e_post={:.6e}, cross={:.6e}, delta={:.6e})",
            self.t_collapse, self.e_pre, self.e_post, self.cross, self.delta
        )
    }
}

#[pyclass(name = "Scheme", frozen)]
struct PyScheme {
    inner: MeasurementScheme,
}

#[pymethods]
impl PyScheme {
    #[new]
    #[pyo3(signature = (hamiltonian, initial_state, pointer_angles = (0.0, 0.0)))]
    fn new(hamiltonian: Rows, initial_state: Vec<Complex64>, pointer_angles: (f64, f64)) -> PyResult<Self> {
        let state = PureState::normalized(initial_state).map_err(py_err)?;
        let inner = MeasurementScheme::new(
            to_matrix(hamiltonian)?,
            QubitBasis::canonical(),
            PointerBasis::from_bloch(pointer_angles.0, pointer_angles.1),
            state,
            vec![1.0],
        )
        .map_err(py_err)?;
        Ok(PyScheme { inner })
    }

    #[staticmethod]
    fn standard() -> Self {
        PyScheme {
            inner: MeasurementScheme::standard(),
        }
    }

    #[getter]
    fn hamiltonian(&self) -> Rows {
        to_rows(self.inner.hamiltonian())
    }

    fn evolve(&self, t: f64) -> PyResult<Vec<Complex64>> {
        Ok(dynamics::evolve(&self.inner, t).map_err(py_err)?.into_amplitudes())
    }

    fn energy_balance(&self, t: f64) -> PyResult<PyLedger> {
        Ok(PyLedger::from(
            &collapse::energy_balance(&self.inner, t).map_err(py_err)?,
        ))
    }

    /// Cumulative energy change after `cycles` collapse-and-reset rounds.
    fn cycle_energy(&self, t: f64, cycles: u64) -> PyResult<f64> {
        Ok(collapse::cycle_ledger(&self.inner, t, cycles)
            .map_err(py_err)?
            .cumulative)
    }

    /// Premeasurement instants on the half-open grid `[t_start, t_end)`.
    #[pyo3(signature = (t_start, t_end, step, tol = 1e-6))]
    fn scan_premeasurement(&self, t_start: f64, t_end: f64, step: f64, tol: f64) -> PyResult<Vec<f64>> {
        let found = dynamics::scan_premeasurement(&self.inner, t_start, t_end, step, tol).map_err(py_err)?;
        Ok(found.into_iter().map(|(t, _)| t).collect())
    }
}

#[pymodule]
#[pyo3(name = "vnmeas")]
fn vnmeas_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("VnmeasError", m.py().get_type::<VnmeasError>())?;
    m.add("PLANCK", vnmeas::units::PLANCK)?;
    m.add_class::<PyScheme>()?;
    m.add_class::<PyLedger>()?;
    m.add_function(wrap_pyfunction!(standard_hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(standard_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(unitary_exp, m)?)?;
    m.add_function(wrap_pyfunction!(principal_log_hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(commutator, m)?)?;
    m.add_function(wrap_pyfunction!(tensor_product, m)?)?;
    m.add_function(wrap_pyfunction!(pauli_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(pauli_compose, m)?)?;
    m.add_function(wrap_pyfunction!(qnd_extend, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
