use crate::error::{Error, Result};
use crate::operator::{ComplexMatrix, Propagator, STRUCTURE_TOL};

use super::basis::{PointerBasis, QubitBasis};
use super::state::PureState;

/// A system qubit coupled to a detector qubit, with the basis pair used to
/// read off correlations and the times at which collapse is postulated.
///
/// The Hamiltonian is diagonalized once at construction.
#[derive(Clone, Debug)]
pub struct MeasurementScheme {
    hamiltonian: ComplexMatrix,
    system_basis: QubitBasis,
    pointer: PointerBasis,
    initial_state: PureState,
    collapse_times: Vec<f64>,
    propagator: Propagator,
}

impl MeasurementScheme {
    pub fn new(
        hamiltonian: ComplexMatrix,
        system_basis: QubitBasis,
        pointer: PointerBasis,
        initial_state: PureState,
        collapse_times: Vec<f64>,
    ) -> Result<Self> {
        if hamiltonian.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: hamiltonian.dim(),
            });
        }
        let residual = hamiltonian.hermitian_residual();
        if residual > STRUCTURE_TOL {
            return Err(Error::NotHermitian { residual });
        }
        if initial_state.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: initial_state.dim(),
            });
        }
        check_times(&collapse_times)?;
        let propagator = Propagator::new(&hamiltonian)?;
        Ok(MeasurementScheme {
            hamiltonian,
            system_basis,
            pointer,
            initial_state,
            collapse_times,
            propagator,
        })
    }

    /// Canonical bases, `(φ₁+φ₂)/√2 ⊗ ψ₀` initially, the reference
    /// Hamiltonian, collapse at `t = 1`.
    pub fn standard() -> Self {
        standard::scheme()
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn system_basis(&self) -> &QubitBasis {
        &self.system_basis
    }

    pub fn pointer(&self) -> &PointerBasis {
        &self.pointer
    }

    pub fn initial_state(&self) -> &PureState {
        &self.initial_state
    }

    pub fn collapse_times(&self) -> &[f64] {
        &self.collapse_times
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    pub fn with_pointer(mut self, pointer: PointerBasis) -> Self {
        self.pointer = pointer;
        self
    }

    pub fn with_system_basis(mut self, basis: QubitBasis) -> Self {
        self.system_basis = basis;
        self
    }

    pub fn with_initial_state(mut self, state: PureState) -> Result<Self> {
        if state.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: state.dim(),
            });
        }
        self.initial_state = state;
        Ok(self)
    }

    pub fn with_collapse_times(mut self, times: Vec<f64>) -> Result<Self> {
        check_times(&times)?;
        self.collapse_times = times;
        Ok(self)
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    match times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        Some(t) => Err(Error::InvalidArgument(format!(
            "collapse time {t} must be finite and ≥ 0"
        ))),
        None => Ok(()),
    }
}

/// The reference two-qubit scheme and its closed-form matrices.
///
/// Basis order is `{φ₁⊗ψ₀, φ₁⊗ψ₁, φ₂⊗ψ₀, φ₂⊗ψ₁}`; energies are in natural
/// units where `h = 2π`, so `h/8 = π/4`.
pub mod standard {
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    use super::*;
    use crate::model::pauli::{Pauli, PauliDecomposition};
    use crate::operator::c64;

    /// Evolution operator at `t = 1 + 4k`.
    pub fn unitary() -> ComplexMatrix {
        let (o, l, i) = (c64(0., 0.), c64(1., 0.), c64(0., 1.));
        ComplexMatrix::from_rows([[o, o, l, o], [o, o, o, l], [o, -i, o, o], [i, o, o, o]])
    }

    /// Evolution operator at `t = 3 + 4k`; swaps the pointer positions.
    pub fn exchanged_unitary() -> ComplexMatrix {
        let (o, l, i) = (c64(0., 0.), c64(1., 0.), c64(0., 1.));
        ComplexMatrix::from_rows([[o, o, o, -i], [o, o, i, o], [l, o, o, o], [o, l, o, o]])
    }

    /// The Hamiltonian, `(h/8)` times a matrix of Gaussian integers.
    pub fn hamiltonian() -> ComplexMatrix {
        let z = c64;
        ComplexMatrix::from_rows([
            [z(1., 0.), z(0., -1.), z(-1., 1.), z(-1., 1.)],
            [z(0., 1.), z(1., 0.), z(1., -1.), z(-1., 1.)],
            [z(-1., -1.), z(1., 1.), z(1., 0.), z(0., -1.)],
            [z(-1., -1.), z(-1., -1.), z(0., 1.), z(1., 0.)],
        ])
        .scale_real(FRAC_PI_4)
    }

    /// `(h/8){(−σ_y − σ_x + 1)⊗1 + 1⊗σ_y − σ_x⊗σ_y + σ_y⊗σ_y}`.
    pub fn pauli() -> PauliDecomposition {
        use Pauli::*;
        PauliDecomposition::zero()
            .with(I, I, 1.0)
            .with(X, I, -1.0)
            .with(Y, I, -1.0)
            .with(I, Y, 1.0)
            .with(X, Y, -1.0)
            .with(Y, Y, 1.0)
            .scaled(FRAC_PI_4)
    }

    /// `(φ₁ + φ₂)/√2 ⊗ ψ₀`.
    pub fn initial_state() -> PureState {
        PureState::new(vec![
            c64(FRAC_1_SQRT_2, 0.),
            c64(0., 0.),
            c64(FRAC_1_SQRT_2, 0.),
            c64(0., 0.),
        ])
        .expect("unit norm")
    }

    pub fn scheme() -> MeasurementScheme {
        MeasurementScheme::new(
            hamiltonian(),
            QubitBasis::canonical(),
            PointerBasis::canonical(),
            initial_state(),
            vec![1.0],
        )
        .expect("reference scheme is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::state::Expectation;
    use crate::operator::c64;
    use crate::units::PLANCK;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn standard_scheme_contents() {
        let s = MeasurementScheme::standard();
        let amps = s.initial_state().amplitudes();
        let expected = [FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0];
        for (a, e) in amps.iter().zip(expected) {
            assert!((a - c64(e, 0.)).norm() < 1e-15);
        }
        assert!((s.hamiltonian()[(0, 0)] - c64(PLANCK / 8.0, 0.)).norm() < 1e-15);
        assert!(s.hamiltonian().is_hermitian(1e-10));
        assert!((s.initial_state().norm() - 1.0).abs() < 1e-10);
        assert_eq!(s.collapse_times(), &[1.0]);
    }

    #[test]
    fn standard_expectations() {
        let h = standard::hamiltonian();
        // ⟨φ₁⊗ψ₀|H|φ₁⊗ψ₀⟩ = h/8
        let e = PureState::basis(4, 0).expectation(&h).unwrap();
        assert!((e - PLANCK / 8.0).abs() < 1e-14);
        // Ψ₀ quadratic form: (h/16)(1 + (−1+i) + (−1−i) + 1) = 0
        let e0 = standard::initial_state().expectation(&h).unwrap();
        assert!(e0.abs() < 1e-14);
    }

    #[test]
    fn validation() {
        let bad = ComplexMatrix::from_fn(4, |i, j| c64((i * 4 + j) as f64, 0.));
        let err = MeasurementScheme::new(
            bad,
            QubitBasis::canonical(),
            PointerBasis::canonical(),
            standard::initial_state(),
            vec![1.0],
        );
        assert!(matches!(err, Err(Error::NotHermitian { .. })));
        assert!(MeasurementScheme::new(
            ComplexMatrix::identity(2),
            QubitBasis::canonical(),
            PointerBasis::canonical(),
            standard::initial_state(),
            vec![],
        )
        .is_err());
        assert!(MeasurementScheme::standard().with_collapse_times(vec![-1.0]).is_err());
        assert!(MeasurementScheme::standard()
            .with_initial_state(PureState::basis(2, 0))
            .is_err());
    }
}
