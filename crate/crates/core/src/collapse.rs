//! Projective collapse of the detector in a pointer basis, the resulting
//! ensembles, and the energy bookkeeping around a collapse event.

use num_complex::Complex64;

use crate::dynamics::evolve;
use crate::error::{Error, Result};
use crate::model::{DensityMatrix, Expectation, MeasurementScheme, PointerBasis, PureState};
use crate::operator::{commutator, tensor_product, ComplexMatrix, Propagator, STRUCTURE_TOL};
use crate::units::to_h;

/// Branches below this probability are dropped.
pub const DEFAULT_PROB_FLOOR: f64 = 1e-12;

/// Allowed deviation of the branch probabilities from 1.
pub const PROBABILITY_TOL: f64 = 1e-10;

/// Largest commutator entry tolerated by [`qnd_extend`].
pub const QND_TOL: f64 = 1e-10;

/// One branch of a pointer-basis collapse.
#[derive(Clone, Debug, PartialEq)]
pub struct CollapseOutcome {
    /// Pointer index `j` of the projector `I ⊗ |ψ'_j⟩⟨ψ'_j|`.
    pub branch: usize,
    pub probability: f64,
    /// `P_j Ψ / ‖P_j Ψ‖`, keeping the phase of `P_j Ψ`.
    pub post_state: PureState,
    /// `⟨post|H|post⟩`; zero until an energy is attached.
    pub branch_energy: f64,
}

/// Collapses the detector qubit of a two-qubit state.
pub fn project(state: &PureState, pointer: &PointerBasis, prob_floor: f64) -> Result<Vec<CollapseOutcome>> {
    let branches = branch_vectors(state, pointer)?;
    let outcomes: Vec<CollapseOutcome> = branches
        .into_iter()
        .enumerate()
        .filter_map(|(branch, v)| {
            let probability: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if probability < prob_floor || probability == 0.0 {
                return None;
            }
            let scale = probability.sqrt();
            let post_state = PureState::normalized(v.into_iter().map(|z| z / scale).collect()).ok()?;
            Some(CollapseOutcome {
                branch,
                probability,
                post_state,
                branch_energy: 0.0,
            })
        })
        .collect();
    if outcomes.is_empty() {
        return Err(Error::DegenerateState { floor: prob_floor });
    }
    Ok(outcomes)
}

/// Unnormalized `P_j Ψ` for both pointer states.
fn branch_vectors(state: &PureState, pointer: &PointerBasis) -> Result<[Vec<Complex64>; 2]> {
    if state.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: state.dim(),
        });
    }
    let amps = state.amplitudes();
    Ok([
        pointer.detector_projector(0).apply(amps)?,
        pointer.detector_projector(1).apply(amps)?,
    ])
}

/// `ρ = Σ p_i |post_i⟩⟨post_i|`.
pub fn ensemble_density(outcomes: &[CollapseOutcome]) -> Result<DensityMatrix> {
    let first = outcomes.first().ok_or(Error::ProbabilityLeak { sum: 0.0 })?;
    let sum: f64 = outcomes.iter().map(|o| o.probability).sum();
    if (sum - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::ProbabilityLeak { sum });
    }
    let dim = first.post_state.dim();
    let mut rho = ComplexMatrix::zeros(dim);
    for o in outcomes {
        let amps = o.post_state.amplitudes();
        rho = &rho + &ComplexMatrix::outer(amps, amps)?.scale_real(o.probability);
    }
    DensityMatrix::new(rho)
}

/// Interference energy `Σ_{j≠k} ⟨P_jΨ|H|P_kΨ⟩` removed by the collapse.
pub fn cross_term(state: &PureState, pointer: &PointerBasis, hamiltonian: &ComplexMatrix) -> Result<f64> {
    let [b0, b1] = branch_vectors(state, pointer)?;
    Ok(2.0 * hamiltonian.sandwich(&b0, &b1)?.re)
}

/// Energy record of one collapse event. Energies are in natural units; the
/// `*_h` accessors report multiples of h.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyLedger {
    pub t_collapse: f64,
    /// `⟨Ψ|H|Ψ⟩` just before collapse.
    pub e_pre: f64,
    /// `Σ p_j ⟨post_j|H|post_j⟩`.
    pub e_post: f64,
    /// Interference term, computed directly; `e_pre = e_post + cross`.
    pub cross: f64,
    /// `e_post − e_pre`.
    pub delta: f64,
    pub outcomes: Vec<CollapseOutcome>,
}

impl EnergyLedger {
    pub fn e_pre_h(&self) -> f64 {
        to_h(self.e_pre)
    }

    pub fn e_post_h(&self) -> f64 {
        to_h(self.e_post)
    }

    pub fn cross_h(&self) -> f64 {
        to_h(self.cross)
    }

    pub fn delta_h(&self) -> f64 {
        to_h(self.delta)
    }

    /// `|e_pre − (e_post + cross)|`.
    pub fn identity_residual(&self) -> f64 {
        (self.e_pre - (self.e_post + self.cross)).abs()
    }
}

/// Ledger for collapsing a given pre-collapse state.
pub fn state_energy_balance(
    state: &PureState,
    hamiltonian: &ComplexMatrix,
    pointer: &PointerBasis,
    t_collapse: f64,
) -> Result<EnergyLedger> {
    let e_pre = state.expectation(hamiltonian)?;
    let mut outcomes = project(state, pointer, DEFAULT_PROB_FLOOR)?;
    for o in &mut outcomes {
        o.branch_energy = o.post_state.expectation(hamiltonian)?;
    }
    let e_post = outcomes.iter().map(|o| o.probability * o.branch_energy).sum();
    let cross = cross_term(state, pointer, hamiltonian)?;
    Ok(EnergyLedger {
        t_collapse,
        e_pre,
        e_post,
        cross,
        delta: e_post - e_pre,
        outcomes,
    })
}

/// Evolves the scheme to `t_collapse` and collapses in its pointer basis.
pub fn energy_balance(scheme: &MeasurementScheme, t_collapse: f64) -> Result<EnergyLedger> {
    let state = evolve(scheme, t_collapse)?;
    state_energy_balance(&state, scheme.hamiltonian(), scheme.pointer(), t_collapse)
}

/// Repeated evolve → collapse → reset cycles. The reset back to the initial
/// state is an ideal external operation and is not charged to the ledger.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleLedger {
    pub per_cycle: EnergyLedger,
    pub cycles: u64,
    pub cumulative: f64,
}

impl CycleLedger {
    pub fn cumulative_h(&self) -> f64 {
        to_h(self.cumulative)
    }
}

pub fn cycle_ledger(scheme: &MeasurementScheme, t_collapse: f64, cycles: u64) -> Result<CycleLedger> {
    let per_cycle = energy_balance(scheme, t_collapse)?;
    let cumulative = cycles as f64 * per_cycle.delta;
    Ok(CycleLedger {
        per_cycle,
        cycles,
        cumulative,
    })
}

fn require(m: &ComplexMatrix, dim: usize) -> Result<()> {
    if m.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: m.dim(),
        });
    }
    let residual = m.hermitian_residual();
    if residual > STRUCTURE_TOL {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

/// Couples the system+probe pair to a one-qubit environment:
/// `H_sp ⊗ I₂ + I₄ ⊗ H_env + H_int`, provided `[H_sp ⊗ I₂, H_int] = 0`.
pub fn qnd_extend(h_sp: &ComplexMatrix, h_env: &ComplexMatrix, h_int: &ComplexMatrix) -> Result<ComplexMatrix> {
    require(h_sp, 4)?;
    require(h_env, 2)?;
    require(h_int, 8)?;
    let lifted = tensor_product(h_sp, &ComplexMatrix::identity(2));
    let norm = commutator(&lifted, h_int)?.max_abs();
    if norm > QND_TOL {
        return Err(Error::NotQnd { norm });
    }
    let env = tensor_product(&ComplexMatrix::identity(4), h_env);
    Ok(&(&lifted + &env) + h_int)
}

/// `⟨H_sp ⊗ I₂⟩` along the evolution generated by `h_total`.
pub fn qnd_energy_trace(
    h_total: &ComplexMatrix,
    h_sp: &ComplexMatrix,
    initial: &PureState,
    times: &[f64],
) -> Result<Vec<f64>> {
    require(h_sp, 4)?;
    let lifted = tensor_product(h_sp, &ComplexMatrix::identity(2));
    let propagator = Propagator::new(h_total)?;
    times
        .iter()
        .map(|&t| initial.evolve_by(&propagator.at(t))?.expectation(&lifted))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{standard, Pauli};
    use crate::operator::{c64, tensor_vec};
    use crate::units::PLANCK;
    use std::f64::consts::FRAC_1_SQRT_2;

    const H8: f64 = PLANCK / 8.0;

    #[test]
    fn projection_at_t1() {
        let s = MeasurementScheme::standard();
        let psi = evolve(&s, 1.0).unwrap();
        let out = project(&psi, s.pointer(), DEFAULT_PROB_FLOOR).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].branch, 0);
        assert!((out[0].probability - 0.5).abs() < 1e-12);
        assert!(out[0].post_state.max_abs_diff(&PureState::basis(4, 0)) < 1e-10);
        assert_eq!(out[1].branch, 1);
        assert!((out[1].probability - 0.5).abs() < 1e-12);
        // P₁Ψ = (i/√2) e₃, normalized keeps the phase i
        let expected = PureState::new(vec![c64(0., 0.), c64(0., 0.), c64(0., 0.), c64(0., 1.)]).unwrap();
        assert!(out[1].post_state.max_abs_diff(&expected) < 1e-10);
    }

    #[test]
    fn projection_at_t3_exchanges_pointers() {
        let s = MeasurementScheme::standard();
        let psi = evolve(&s, 3.0).unwrap();
        let out = project(&psi, s.pointer(), DEFAULT_PROB_FLOOR).unwrap();
        assert_eq!(out.len(), 2);
        // ψ₀ branch supported on φ₂⊗ψ₀ (index 2), ψ₁ branch on φ₁⊗ψ₁ (index 1)
        assert!((out[0].post_state.amplitudes()[2].norm() - 1.0).abs() < 1e-10);
        assert!((out[1].post_state.amplitudes()[1].norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn product_state_has_one_branch() {
        let out = project(&PureState::basis(4, 0), &PointerBasis::canonical(), DEFAULT_PROB_FLOOR).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].probability, 1.0);
        let rho = ensemble_density(&out).unwrap();
        assert!(
            rho.matrix()
                .max_abs_diff(&PureState::basis(4, 0).to_density().matrix().clone())
                < 1e-15
        );
    }

    #[test]
    fn project_errors() {
        assert!(matches!(
            project(&PureState::basis(2, 0), &PointerBasis::canonical(), 1e-12),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            project(
                &MeasurementScheme::standard().initial_state().clone(),
                &PointerBasis::canonical(),
                2.0
            ),
            Err(Error::DegenerateState { .. })
        ));
    }

    #[test]
    fn leaking_ensemble_is_rejected() {
        let s = MeasurementScheme::standard();
        let psi = evolve(&s, 1.0).unwrap();
        let mut out = project(&psi, s.pointer(), DEFAULT_PROB_FLOOR).unwrap();
        out.pop();
        assert!(matches!(ensemble_density(&out), Err(Error::ProbabilityLeak { .. })));
        assert!(matches!(ensemble_density(&[]), Err(Error::ProbabilityLeak { .. })));
    }

    #[test]
    fn reference_density_and_purity() {
        let s = MeasurementScheme::standard();
        let psi = evolve(&s, 1.0).unwrap();
        let rho = ensemble_density(&project(&psi, s.pointer(), DEFAULT_PROB_FLOOR).unwrap()).unwrap();
        let expected = ComplexMatrix::from_diagonal(&[c64(0.5, 0.), c64(0., 0.), c64(0., 0.), c64(0.5, 0.)]);
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-10);
        assert!((rho.purity() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn standard_ledgers() {
        let s = MeasurementScheme::standard();
        for t in [1.0, 3.0] {
            let l = energy_balance(&s, t).unwrap();
            assert!(l.e_pre.abs() < 1e-10);
            assert!((l.e_post - H8).abs() < 1e-9 * H8);
            assert!((l.delta - H8).abs() < 1e-9);
            assert!((l.cross + H8).abs() < 1e-9);
            assert!(l.identity_residual() < 1e-12);
        }
    }

    #[test]
    fn cross_term_matches_off_diagonal_expansion() {
        // (i/2)[⟨a|H|b⟩ − ⟨b|H|a⟩] with a = φ₁⊗ψ₀, b = φ₂⊗ψ₁
        let h = standard::hamiltonian();
        let expansion = (c64(0., 0.5) * (h[(0, 3)] - h[(3, 0)])).re;
        let s = MeasurementScheme::standard();
        let psi = evolve(&s, 1.0).unwrap();
        let cross = cross_term(&psi, s.pointer(), &h).unwrap();
        assert!((cross - expansion).abs() < 1e-12);
        assert!((expansion + H8).abs() < 1e-12);
    }

    #[test]
    fn diagonal_hamiltonian_conserves_energy() {
        let zz = Pauli::pair_matrix(Pauli::Z, Pauli::Z);
        let psi = PureState::normalized(vec![c64(0.3, 0.1), c64(-0.2, 0.5), c64(0.7, 0.), c64(0.1, -0.4)]).unwrap();
        let l = state_energy_balance(&psi, &zz, &PointerBasis::canonical(), 0.0).unwrap();
        assert!(l.delta.abs() < 1e-12);
    }

    #[test]
    fn cycles_scale_linearly() {
        let s = MeasurementScheme::standard();
        assert_eq!(cycle_ledger(&s, 1.0, 0).unwrap().cumulative, 0.0);
        let one = cycle_ledger(&s, 1.0, 1).unwrap();
        assert!((one.cumulative_h() - 0.125).abs() < 1e-9);
        let hundred = cycle_ledger(&s, 1.0, 100).unwrap();
        assert!((hundred.cumulative_h() - 12.5).abs() < 100.0 * 1e-9);
    }

    #[test]
    fn qnd_accepts_functions_of_h_sp() {
        let h_sp = standard::hamiltonian();
        let h_int = tensor_product(&h_sp, &Pauli::X.matrix());
        let total = qnd_extend(&h_sp, &Pauli::Z.matrix(), &h_int).unwrap();
        assert!(total.is_hermitian(1e-12));
        assert_eq!(total.dim(), 8);

        let initial = PureState::new(tensor_vec(
            standard::initial_state().amplitudes(),
            &[c64(FRAC_1_SQRT_2, 0.), c64(0., FRAC_1_SQRT_2)],
        ))
        .unwrap();
        let times: Vec<f64> = (0..=40).map(|k| 0.1 * k as f64).collect();
        let trace = qnd_energy_trace(&total, &h_sp, &initial, &times).unwrap();
        for e in &trace {
            assert!((e - trace[0]).abs() < 1e-9);
        }
    }

    #[test]
    fn qnd_rejects_non_commuting_coupling() {
        let h_sp = standard::hamiltonian();
        let h_int = tensor_product(&Pauli::pair_matrix(Pauli::X, Pauli::I), &Pauli::X.matrix());
        match qnd_extend(&h_sp, &Pauli::Z.matrix(), &h_int) {
            Err(Error::NotQnd { norm }) => assert!(norm > 0.1),
            other => panic!("expected NotQnd, got {other:?}"),
        }
        assert!(matches!(
            qnd_extend(&h_sp, &ComplexMatrix::identity(4), &h_int),
            Err(Error::DimensionMismatch { expected: 2, found: 4 })
        ));
    }
}
