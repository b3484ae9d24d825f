//! Simulation and energy bookkeeping for von Neumann measurement models: a
//! system qubit entangled with a detector qubit by a Hamiltonian, followed by
//! projective collapse of the detector in a chosen pointer basis.
//!
//! Natural units are used throughout (ħ = 1, so h = 2π); see [`units`].

pub mod cli;
pub mod collapse;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod operator;
pub mod units;

pub use collapse::{
    cross_term, cycle_ledger, energy_balance, ensemble_density, project, qnd_energy_trace, qnd_extend,
    state_energy_balance, CollapseOutcome, CycleLedger, EnergyLedger,
};
pub use dynamics::{correlation_report, evolve, scan_premeasurement, CorrelationReport};
pub use error::{Error, MatrixKind, Result};
pub use model::{
    expectation, pauli_compose, pauli_decompose, split_terms, standard, DensityMatrix, Expectation, MeasurementScheme,
    Pauli, PauliDecomposition, PointerBasis, PureState, QubitBasis, SplitTerms,
};
pub use operator::{
    commutator, principal_log_hamiltonian, spectral_decompose, tensor_product, unitary_exp, ComplexMatrix,
    SpectralDecomposition,
};
