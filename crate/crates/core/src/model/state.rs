use num_complex::Complex64;

use crate::error::MatrixKind;
use crate::error::{Error, Result};
use crate::operator::{spectral_decompose, ComplexMatrix, STRUCTURE_TOL};

/// Tolerance on the norm of a [`PureState`].
pub const NORM_TOL: f64 = 1e-10;

/// Floor for density-matrix eigenvalues.
pub const PSD_FLOOR: f64 = -1e-10;

/// Normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl PureState {
    /// Accepts amplitudes that are already normalized within `1e-10`.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("empty amplitude vector".into()));
        }
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm} differs from 1")));
        }
        Ok(PureState { amplitudes })
    }

    /// Rescales to unit norm. Fails on the zero vector or non-finite input.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidState(format!("cannot normalize vector of norm {norm}")));
        }
        Ok(PureState {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    /// Canonical basis vector `e_k`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        PureState { amplitudes }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn with_global_phase(&self, phase: f64) -> PureState {
        let w = Complex64::from_polar(1.0, phase);
        PureState {
            amplitudes: self.amplitudes.iter().map(|z| z * w).collect(),
        }
    }

    /// Applies an operator that is assumed to preserve the norm.
    pub fn evolve_by(&self, u: &ComplexMatrix) -> Result<PureState> {
        Ok(PureState {
            amplitudes: u.apply(&self.amplitudes)?,
        })
    }

    pub fn max_abs_diff(&self, other: &PureState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).norm()))
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes).expect("same vector on both sides"),
        }
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let residual = matrix.hermitian_residual();
        if residual > STRUCTURE_TOL {
            return Err(Error::NotHermitian { residual });
        }
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > STRUCTURE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let spectrum = spectral_decompose(&matrix, MatrixKind::Hermitian, STRUCTURE_TOL)?;
        if let Some(low) = spectrum.eigenvalues.iter().map(|z| z.re).find(|&x| x < PSD_FLOOR) {
            return Err(Error::InvalidState(format!("negative eigenvalue {low}")));
        }
        Ok(DensityMatrix { matrix })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }
}

/// Real expectation value of a Hermitian observable.
pub trait Expectation {
    fn expectation(&self, observable: &ComplexMatrix) -> Result<f64>;
}

fn check_observable(dim: usize, a: &ComplexMatrix) -> Result<()> {
    if a.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: a.dim(),
        });
    }
    let residual = a.hermitian_residual();
    if residual > STRUCTURE_TOL {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

fn real_part_checked(z: Complex64, a: &ComplexMatrix) -> Result<f64> {
    // imaginary residue is bounded by the Hermiticity residual times the dimension
    let bound = STRUCTURE_TOL * a.dim() as f64 * a.max_abs().max(1.0);
    if z.im.abs() > bound {
        return Err(Error::NotHermitian { residual: z.im.abs() });
    }
    Ok(z.re)
}

impl Expectation for PureState {
    fn expectation(&self, a: &ComplexMatrix) -> Result<f64> {
        check_observable(self.dim(), a)?;
        let z = a.sandwich(&self.amplitudes, &self.amplitudes)?;
        real_part_checked(z, a)
    }
}

impl Expectation for DensityMatrix {
    fn expectation(&self, a: &ComplexMatrix) -> Result<f64> {
        check_observable(self.dim(), a)?;
        let z = (&self.matrix * a).trace();
        real_part_checked(z, a)
    }
}

pub fn expectation<S: Expectation + ?Sized>(state: &S, observable: &ComplexMatrix) -> Result<f64> {
    state.expectation(observable)
}
