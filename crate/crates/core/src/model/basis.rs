use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{c64, tensor_product, ComplexMatrix};

/// Orthonormality tolerance for qubit bases.
pub const BASIS_TOL: f64 = 1e-12;

/// Orthonormal basis of a single qubit.
///
/// Built from Bloch angles as
/// `v0 = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`,
/// `v1 = −e^{−iφ} sin(θ/2)|0⟩ + cos(θ/2)|1⟩`,
/// or from two explicit vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitBasis {
    vectors: [[Complex64; 2]; 2],
    bloch: Option<(f64, f64)>,
}

/// The detector basis in which collapse is postulated.
pub type PointerBasis = QubitBasis;

impl QubitBasis {
    pub fn canonical() -> Self {
        Self::from_bloch(0.0, 0.0)
    }

    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        let e = Complex64::from_polar(1.0, phi);
        QubitBasis {
            vectors: [[c64(c, 0.0), e * s], [-e.conj() * s, c64(c, 0.0)]],
            bloch: Some((theta, phi)),
        }
    }

    /// Renormalizes both vectors and rejects them if they are not orthogonal.
    pub fn from_vectors(v0: [Complex64; 2], v1: [Complex64; 2]) -> Result<Self> {
        let unit = |v: [Complex64; 2]| -> Result<[Complex64; 2]> {
            let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            if !n.is_finite() || n == 0.0 {
                return Err(Error::InvalidBasis(format!("basis vector of norm {n}")));
            }
            Ok([v[0] / n, v[1] / n])
        };
        let (a, b) = (unit(v0)?, unit(v1)?);
        let overlap = (a[0].conj() * b[0] + a[1].conj() * b[1]).norm();
        if overlap > BASIS_TOL {
            return Err(Error::InvalidBasis(format!("vectors overlap by {overlap:.3e}")));
        }
        Ok(QubitBasis {
            vectors: [a, b],
            bloch: None,
        })
    }

    pub fn vector(&self, j: usize) -> [Complex64; 2] {
        self.vectors[j]
    }

    pub fn bloch_angles(&self) -> Option<(f64, f64)> {
        self.bloch
    }

    /// `|v_j⟩⟨v_j|` on the qubit.
    pub fn projector(&self, j: usize) -> ComplexMatrix {
        let v = &self.vectors[j];
        ComplexMatrix::outer(v, v).expect("two-component vectors")
    }

    /// `I₂ ⊗ |v_j⟩⟨v_j|`: the projector acting on the detector factor.
    pub fn detector_projector(&self, j: usize) -> ComplexMatrix {
        tensor_product(&ComplexMatrix::identity(2), &self.projector(j))
    }

    /// `|v_j⟩⟨v_j| ⊗ I₂`: the projector acting on the system factor.
    pub fn system_projector(&self, j: usize) -> ComplexMatrix {
        tensor_product(&self.projector(j), &ComplexMatrix::identity(2))
    }
}
