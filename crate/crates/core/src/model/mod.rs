//! States, bases, Pauli-tensor algebra and the measurement scheme value type.

mod basis;
mod pauli;
mod scheme;
mod state;

pub use basis::{PointerBasis, QubitBasis, BASIS_TOL};
pub use pauli::{pauli_compose, pauli_decompose, split_terms, Pauli, PauliDecomposition, SplitTerms};
pub use scheme::{standard, MeasurementScheme};
pub use state::{expectation, DensityMatrix, Expectation, PureState, NORM_TOL};
