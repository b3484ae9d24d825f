//! Dense complex matrix algebra for the small (dim ≤ 8) operators used by the
//! measurement models: products, adjoints, Kronecker products, spectral
//! decomposition of unitary and Hermitian matrices, the matrix exponential of a
//! Hamiltonian and the principal logarithm of a unitary.
//!
//! Units are natural (ħ = 1). A Hamiltonian `H` generates `U(t) = exp(-i H t)`.

use std::f64::consts::PI;
use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, MatrixKind, Result};

/// Default tolerance for the unitary / Hermitian preconditions.
pub const STRUCTURE_TOL: f64 = 1e-10;

/// Eigen-energies within this distance of `-π` are mapped onto `+π`.
pub const BRANCH_CUT_TOL: f64 = 1e-12;

// Eigenvalues of the Hermitian parts closer than this are resolved by a
// second diagonalization inside their common subspace.
const CLUSTER_GAP: f64 = 1e-3;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Builds a `dim × dim` matrix from row-major entries.
    ///
    /// Panics if `entries.len() != dim * dim`.
    pub fn from_row_slice(dim: usize, entries: &[Complex64]) -> Self {
        assert_eq!(entries.len(), dim * dim, "expected {} entries", dim * dim);
        ComplexMatrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_rows<const N: usize>(rows: [[Complex64; N]; N]) -> Self {
        let flat: Vec<Complex64> = rows.iter().flatten().copied().collect();
        Self::from_row_slice(N, &flat)
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        ComplexMatrix(DMatrix::from_fn(dim, dim, f))
    }

    pub fn from_nalgebra(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        Ok(ComplexMatrix(m))
    }

    pub fn identity(dim: usize) -> Self {
        ComplexMatrix(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(dim, dim))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        ComplexMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        Ok(Self::from_fn(a.len(), |i, j| a[i] * b[j].conj()))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Row-major copy of the entries.
    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        ComplexMatrix(self.0.map(|z| z * factor))
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        ComplexMatrix(self.0.map(|z| z * factor))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// `‖self − other‖_max`. Panics on dimension mismatch.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).norm()))
    }

    pub fn hermitian_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn unitary_residual(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.dim()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_residual() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitary_residual() <= tol
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        let out = &self.0 * DVector::from_column_slice(v);
        Ok(out.iter().copied().collect())
    }

    /// `⟨a|self|b⟩`.
    pub fn sandwich(&self, a: &[Complex64], b: &[Complex64]) -> Result<Complex64> {
        let mb = self.apply(b)?;
        if a.len() != mb.len() {
            return Err(Error::DimensionMismatch {
                expected: mb.len(),
                found: a.len(),
            });
        }
        Ok(a.iter().zip(&mb).map(|(x, y)| x.conj() * y).sum())
    }

    pub fn checked_mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_same_dim(self, other)?;
        Ok(self * other)
    }

    /// Symmetrized copy `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        ComplexMatrix((&self.0 + self.0.adjoint()) * c64(0.5, 0.0))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

fn check_same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// `AB − BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_same_dim(a, b)?;
    Ok(&(a * b) - &(b * a))
}

/// Kronecker product `A ⊗ B`. The left factor indexes the major (outer)
/// block, so `e_i ⊗ e_j` lands on index `i * dim(B) + j`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// Kronecker product of two vectors, same index convention as [`tensor_product`].
pub fn tensor_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Eigen-decomposition `A = V diag(λ) V†` of a normal matrix.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<Complex64>,
    /// Orthonormal eigenvectors stored as columns.
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V f(diag(λ)) V†`.
    pub fn map_eigenvalues(&self, f: impl Fn(Complex64) -> Complex64) -> ComplexMatrix {
        let v = self.eigenvectors.as_nalgebra();
        let d = DVector::from_iterator(self.dim(), self.eigenvalues.iter().map(|&z| f(z)));
        let mut scaled = v.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= d[j];
        }
        ComplexMatrix(scaled * v.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_eigenvalues(|z| z)
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.as_nalgebra().column(k).iter().copied().collect()
    }
}

/// Diagonalizes a unitary or Hermitian matrix.
///
/// Hermitian input yields real eigenvalues in ascending order. Unitary input
/// is reduced to the commuting Hermitian pair `(U+U†)/2`, `(U−U†)/2i`; near
/// degenerate clusters of the first are split by the second, and whatever is
/// still clustered is split by the imaginary part of `U` rotated onto the
/// cluster's mean phase.
pub fn spectral_decompose(a: &ComplexMatrix, kind: MatrixKind, tol: f64) -> Result<SpectralDecomposition> {
    let residual = match kind {
        MatrixKind::Unitary => a.unitary_residual(),
        MatrixKind::Hermitian => a.hermitian_residual(),
    };
    // NaN residuals are rejected too
    if residual.is_nan() || residual > tol {
        return Err(Error::NotNormal { kind, residual, tol });
    }
    match kind {
        MatrixKind::Hermitian => Ok(hermitian_decompose(&a.0)),
        MatrixKind::Unitary => Ok(unitary_decompose(&a.0)),
    }
}

fn hermitian_decompose(a: &DMatrix<Complex64>) -> SpectralDecomposition {
    let (vals, vecs) = hermitian_eigh(a);
    let mut q = vecs;
    gram_schmidt(&mut q);
    SpectralDecomposition {
        eigenvalues: vals.into_iter().map(|x| c64(x, 0.0)).collect(),
        eigenvectors: ComplexMatrix(q),
    }
}

/// Eigenpairs of the Hermitian part of `a`, sorted by ascending eigenvalue.
fn hermitian_eigh(a: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let n = a.nrows();
    if n == 1 {
        return (vec![a[(0, 0)].re], DMatrix::identity(1, 1));
    }
    let sym = (a + a.adjoint()) * c64(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Splits sorted values into runs whose consecutive gaps are ≤ `gap`.
fn clusters(sorted: &[f64], gap: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=sorted.len() {
        if k == sorted.len() || sorted[k] - sorted[k - 1] > gap {
            out.push(start..k);
            start = k;
        }
    }
    out
}

fn columns(m: &DMatrix<Complex64>, range: std::ops::Range<usize>) -> DMatrix<Complex64> {
    m.columns(range.start, range.len()).into_owned()
}

fn unitary_decompose(u: &DMatrix<Complex64>) -> SpectralDecomposition {
    let n = u.nrows();
    let ua = u.adjoint();
    let re_part = (u + &ua) * c64(0.5, 0.0);
    let im_part = (u - &ua) * c64(0.0, -0.5);

    let (a_vals, a_vecs) = hermitian_eigh(&re_part);
    let mut cols: Vec<DVector<Complex64>> = Vec::with_capacity(n);

    for ra in clusters(&a_vals, CLUSTER_GAP) {
        let va = columns(&a_vecs, ra);
        if va.ncols() == 1 {
            cols.push(va.column(0).into_owned());
            continue;
        }
        let (b_vals, qb) = hermitian_eigh(&(va.adjoint() * &im_part * &va));
        let vb = &va * qb;
        for rb in clusters(&b_vals, CLUSTER_GAP) {
            let vs = columns(&vb, rb);
            if vs.ncols() == 1 {
                cols.push(vs.column(0).into_owned());
                continue;
            }
            // All eigenphases in this block sit on a short arc; after rotating
            // the arc onto phase 0 the sine part orders them monotonically.
            let restricted = vs.adjoint() * u * &vs;
            let alpha = restricted.trace().arg();
            let rot = restricted * Complex64::from_polar(1.0, -alpha);
            let sine = (&rot - rot.adjoint()) * c64(0.0, -0.5);
            let (_, qs) = hermitian_eigh(&sine);
            let refined = &vs * qs;
            cols.extend(refined.column_iter().map(|c| c.into_owned()));
        }
    }

    let mut q = DMatrix::from_columns(&cols);
    gram_schmidt(&mut q);
    let eigenvalues = q
        .column_iter()
        .map(|v| {
            let uv = u * v;
            v.dotc(&uv)
        })
        .collect();
    SpectralDecomposition {
        eigenvalues,
        eigenvectors: ComplexMatrix(q),
    }
}

/// Modified Gram–Schmidt with one reorthogonalization pass.
fn gram_schmidt(q: &mut DMatrix<Complex64>) {
    let n = q.ncols();
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let qk = q.column(k).into_owned();
                let proj = qk.dotc(&q.column(j));
                let mut cj = q.column_mut(j);
                cj -= qk * proj;
            }
        }
        let norm = q.column(j).norm();
        let mut cj = q.column_mut(j);
        cj /= c64(norm, 0.0);
    }
}

/// Evolution operator factory for a fixed Hamiltonian; diagonalizes once.
#[derive(Clone, Debug)]
pub struct Propagator {
    spectrum: SpectralDecomposition,
}

impl Propagator {
    pub fn new(hamiltonian: &ComplexMatrix) -> Result<Self> {
        let spectrum = spectral_decompose(hamiltonian, MatrixKind::Hermitian, STRUCTURE_TOL)?;
        Ok(Propagator { spectrum })
    }

    /// `exp(-i H t)`.
    pub fn at(&self, t: f64) -> ComplexMatrix {
        self.spectrum.map_eigenvalues(|e| Complex64::from_polar(1.0, -e.re * t))
    }

    pub fn energies(&self) -> Vec<f64> {
        self.spectrum.eigenvalues.iter().map(|z| z.re).collect()
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }
}

/// `exp(-i H t)` for Hermitian `H` (ħ = 1), computed spectrally.
pub fn unitary_exp(hamiltonian: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    Ok(Propagator::new(hamiltonian)?.at(t))
}

/// Maps an eigenvalue of a unitary to the eigen-energy that generates it in
/// unit time: `E = −arg λ`, confined to `(−π, π]` with the cut sent to `+π`.
pub fn principal_energy(lambda: Complex64) -> f64 {
    let e = -lambda.arg();
    if (e + PI).abs() <= BRANCH_CUT_TOL {
        PI
    } else {
        e
    }
}

/// Hermitian `H = i·Log U` with principal eigen-energies in `(−π, π]`, so that
/// `exp(-i H) = U`.
pub fn principal_log_hamiltonian(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spectrum = spectral_decompose(u, MatrixKind::Unitary, STRUCTURE_TOL)?;
    let h = spectrum.map_eigenvalues(|z| c64(principal_energy(z), 0.0));
    Ok(h.hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sx() -> ComplexMatrix {
        ComplexMatrix::from_rows([[c64(0., 0.), c64(1., 0.)], [c64(1., 0.), c64(0., 0.)]])
    }
    fn sy() -> ComplexMatrix {
        ComplexMatrix::from_rows([[c64(0., 0.), c64(0., -1.)], [c64(0., 1.), c64(0., 0.)]])
    }
    fn sz() -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&[c64(1., 0.), c64(-1., 0.)])
    }

    fn reference_unitary() -> ComplexMatrix {
        let (o, l, i) = (c64(0., 0.), c64(1., 0.), c64(0., 1.));
        ComplexMatrix::from_rows([[o, o, l, o], [o, o, o, l], [o, -i, o, o], [i, o, o, o]])
    }

    #[test]
    fn identity_spectrum() {
        let d = spectral_decompose(&ComplexMatrix::identity(4), MatrixKind::Unitary, 1e-10).unwrap();
        for z in &d.eigenvalues {
            assert!((z - c64(1., 0.)).norm() < 1e-12);
        }
        assert!(d.reconstruct().max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn diagonal_hermitian_spectrum() {
        let a = ComplexMatrix::from_diagonal(&[c64(1., 0.), c64(2., 0.), c64(3., 0.), c64(4., 0.)]);
        let d = spectral_decompose(&a, MatrixKind::Hermitian, 1e-10).unwrap();
        for (k, z) in d.eigenvalues.iter().enumerate() {
            assert!((z.re - (k + 1) as f64).abs() < 1e-12 && z.im == 0.0);
            let v = d.eigenvector(k);
            // canonical basis up to phase
            assert!((v[k].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_normal_input() {
        let mut rows = [[c64(0., 0.); 2]; 2];
        rows[0][1] = c64(1., 0.);
        let n = ComplexMatrix::from_rows(rows);
        assert!(matches!(
            spectral_decompose(&n, MatrixKind::Unitary, 1e-10),
            Err(Error::NotNormal {
                kind: MatrixKind::Unitary,
                ..
            })
        ));
        assert!(matches!(
            spectral_decompose(&n, MatrixKind::Hermitian, 1e-10),
            Err(Error::NotNormal {
                kind: MatrixKind::Hermitian,
                ..
            })
        ));
        assert!(principal_log_hamiltonian(&n).is_err());
        assert!(unitary_exp(&n, 1.0).is_err());
    }

    #[test]
    fn degenerate_unitary_spectrum() {
        // eigenphases {π/2, −π/2} twice each; the real part is fully degenerate
        let u = tensor_product(&sy().scale(c64(0., 1.)), &ComplexMatrix::identity(2));
        let d = spectral_decompose(&u, MatrixKind::Unitary, 1e-10).unwrap();
        assert!(d.reconstruct().max_abs_diff(&u) < 1e-12);
        assert!(d.eigenvectors.is_unitary(1e-12));
    }

    #[test]
    fn nearly_degenerate_unitary_spectrum() {
        let phases = [0.3, 0.3 + 1e-9, -0.3, 0.3 + 4e-4, 2.0, -2.0 + 1e-7, PI, -PI + 1e-8];
        let diag: Vec<Complex64> = phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
        let q = unitary_exp(&random_like_hermitian(), 0.7).unwrap();
        let u = &(&q * &ComplexMatrix::from_diagonal(&diag)) * &q.adjoint();
        let d = spectral_decompose(&u, MatrixKind::Unitary, 1e-10).unwrap();
        assert!(d.reconstruct().max_abs_diff(&u) < 1e-10);
        assert!(d.eigenvectors.is_unitary(1e-10));
    }

    fn random_like_hermitian() -> ComplexMatrix {
        let a = ComplexMatrix::from_fn(8, |i, j| {
            c64(((i * 7 + j * 3) % 5) as f64 * 0.3 - 0.6, ((i + 2 * j) % 3) as f64 * 0.2)
        });
        a.hermitian_part()
    }

    #[test]
    fn tensor_product_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor_product(&i2, &i2), ComplexMatrix::identity(4));

        let (o, l) = (c64(0., 0.), c64(1., 0.));
        let expected = ComplexMatrix::from_rows([[o, o, o, -l], [o, o, l, o], [o, l, o, o], [-l, o, o, o]]);
        assert!(tensor_product(&sy(), &sy()).max_abs_diff(&expected) < 1e-15);

        let phi2 = [o, l];
        let psi1 = [o, l];
        assert_eq!(tensor_vec(&phi2, &psi1), vec![o, o, o, l]);
    }

    #[test]
    fn commutator_examples() {
        let c = commutator(&sx(), &sy()).unwrap();
        assert!(c.max_abs_diff(&sz().scale(c64(0., 2.))) < 1e-15);

        let a = random_like_hermitian();
        assert!(commutator(&a, &a).unwrap().max_abs() < 1e-14);

        assert!(matches!(
            commutator(&sx(), &ComplexMatrix::identity(4)),
            Err(Error::DimensionMismatch { expected: 2, found: 4 })
        ));
    }

    #[test]
    fn zero_generator_gives_identity() {
        for t in [0.0, 1.0, 3.7] {
            let u = unitary_exp(&ComplexMatrix::zeros(4), t).unwrap();
            assert!(u.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        }
    }

    #[test]
    fn log_of_identity_is_zero() {
        let h = principal_log_hamiltonian(&ComplexMatrix::identity(4)).unwrap();
        assert!(h.max_abs() < 1e-15);
    }

    #[test]
    fn log_commutes_with_its_unitary() {
        let u = reference_unitary();
        let h = principal_log_hamiltonian(&u).unwrap();
        assert!(commutator(&h, &u).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn branch_cut_maps_to_positive_pi() {
        assert_eq!(principal_energy(c64(-1.0, 0.0)), PI);
        assert!((principal_energy(c64(-1.0, -1e-15)) - PI).abs() < 1e-14);
        assert_eq!(principal_energy(c64(-1.0, 1e-15)), PI);
        let e = principal_energy(Complex64::from_polar(1.0, -PI + 1e-6));
        assert!((e - (PI - 1e-6)).abs() < 1e-12);

        let h = principal_log_hamiltonian(&ComplexMatrix::identity(2).scale(c64(-1., 0.))).unwrap();
        assert!(h.max_abs_diff(&ComplexMatrix::identity(2).scale_real(PI)) < 1e-14);
    }

    #[test]
    fn apply_checks_dimension() {
        let v = vec![c64(1., 0.); 3];
        assert!(ComplexMatrix::identity(4).apply(&v).is_err());
        assert!(ComplexMatrix::outer(&v, &v[..2]).is_err());
    }
}
