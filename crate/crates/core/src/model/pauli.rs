//! Two-qubit Pauli-tensor expansion `H = Σ c[a][b] σ_a ⊗ σ_b`.
//!
//! The first index refers to the system qubit, the second to the detector, so
//! the label `"XY"` stands for `σ_x ⊗ σ_y`.

use std::fmt;

use crate::error::{Error, Result};
use crate::operator::{c64, tensor_product, ComplexMatrix, STRUCTURE_TOL};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn matrix(self) -> ComplexMatrix {
        let (o, l, i) = (c64(0., 0.), c64(1., 0.), c64(0., 1.));
        match self {
            Pauli::I => ComplexMatrix::identity(2),
            Pauli::X => ComplexMatrix::from_rows([[o, l], [l, o]]),
            Pauli::Y => ComplexMatrix::from_rows([[o, -i], [i, o]]),
            Pauli::Z => ComplexMatrix::from_rows([[l, o], [o, -l]]),
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// `σ_a ⊗ σ_b`.
    pub fn pair_matrix(a: Pauli, b: Pauli) -> ComplexMatrix {
        tensor_product(&a.matrix(), &b.matrix())
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Real coefficients over the 16 products `σ_a ⊗ σ_b`, in energy units.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PauliDecomposition {
    pub coefficients: [[f64; 4]; 4],
}

impl PauliDecomposition {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn get(&self, a: Pauli, b: Pauli) -> f64 {
        self.coefficients[a.index()][b.index()]
    }

    pub fn set(&mut self, a: Pauli, b: Pauli, value: f64) {
        self.coefficients[a.index()][b.index()] = value;
    }

    pub fn with(mut self, a: Pauli, b: Pauli, value: f64) -> Self {
        self.set(a, b, value);
        self
    }

    /// Parses a two-letter label such as `"XI"`.
    pub fn parse_label(label: &str) -> Option<(Pauli, Pauli)> {
        let mut chars = label.chars();
        let a = Pauli::from_char(chars.next()?)?;
        let b = Pauli::from_char(chars.next()?)?;
        if chars.next().is_some() {
            return None;
        }
        Some((a, b))
    }

    /// All 16 `(label, coefficient)` pairs in `I, X, Y, Z` order.
    pub fn labeled(&self) -> impl Iterator<Item = (String, f64)> + '_ {
        Pauli::ALL
            .into_iter()
            .flat_map(move |a| Pauli::ALL.into_iter().map(move |b| (format!("{a}{b}"), self.get(a, b))))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.coefficients.iter_mut().flatten().for_each(|c| *c *= factor);
        out
    }
}

/// `c[a][b] = tr((σ_a ⊗ σ_b) H) / 4` for a Hermitian 4×4 `H`.
pub fn pauli_decompose(h: &ComplexMatrix) -> Result<PauliDecomposition> {
    if h.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: h.dim(),
        });
    }
    let residual = h.hermitian_residual();
    if residual > STRUCTURE_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let mut d = PauliDecomposition::zero();
    for a in Pauli::ALL {
        for b in Pauli::ALL {
            let c = (&Pauli::pair_matrix(a, b) * h).trace() / 4.0;
            if c.im.abs() > STRUCTURE_TOL {
                return Err(Error::NotHermitian { residual: c.im.abs() });
            }
            d.set(a, b, c.re);
        }
    }
    Ok(d)
}

pub fn pauli_compose(d: &PauliDecomposition) -> ComplexMatrix {
    compose_filtered(d, |_, _| true)
}

fn compose_filtered(d: &PauliDecomposition, keep: impl Fn(Pauli, Pauli) -> bool) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(4);
    for a in Pauli::ALL {
        for b in Pauli::ALL {
            let c = d.get(a, b);
            if c != 0.0 && keep(a, b) {
                acc = &acc + &Pauli::pair_matrix(a, b).scale_real(c);
            }
        }
    }
    acc
}

/// `H = H1 + H2 + HI` grouping of a decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitTerms {
    /// Terms `σ_a ⊗ I`, including the constant `I ⊗ I`.
    pub system: ComplexMatrix,
    /// Terms `I ⊗ σ_b` with `b ≠ I`.
    pub detector: ComplexMatrix,
    /// Remaining `σ_a ⊗ σ_b` with `a, b ≠ I`.
    pub interaction: ComplexMatrix,
}

pub fn split_terms(d: &PauliDecomposition) -> SplitTerms {
    SplitTerms {
        system: compose_filtered(d, |_, b| b == Pauli::I),
        detector: compose_filtered(d, |a, b| a == Pauli::I && b != Pauli::I),
        interaction: compose_filtered(d, |a, b| a != Pauli::I && b != Pauli::I),
    }
}
