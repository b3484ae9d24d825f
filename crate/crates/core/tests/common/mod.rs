//! Test-only oracles, independent of the spectral code paths they check.
#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use vnmeas::operator::c64;
use vnmeas::ComplexMatrix;

/// `exp(-i H t)` by scaling and squaring of a truncated Taylor series.
pub fn expm_taylor(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let a = h.scale(c64(0.0, -t));
    let norm = a.max_abs() * a.dim() as f64;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale_real(0.5f64.powi(squarings as i32));
    let mut term = ComplexMatrix::identity(a.dim());
    let mut sum = term.clone();
    for k in 1..=30 {
        term = (&term * &scaled).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(m: &ComplexMatrix) -> Complex64 {
    let n = m.dim();
    let mut a = m.to_rows();
    let mut det = c64(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        if a[pivot][col].norm() == 0.0 {
            return c64(0.0, 0.0);
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in rest.iter_mut() {
            let f = row[col] / pivot_row[col];
            for (x, p) in row.iter_mut().zip(pivot_row).skip(col) {
                *x -= f * p;
            }
        }
    }
    det
}

pub fn matrix_from(dim: usize, v: &[(f64, f64)]) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |i, j| c64(v[dim * i + j].0, v[dim * i + j].1))
}

/// Hermitian matrix with Frobenius norm at most `bound`.
pub fn hermitian(dim: usize, bound: f64) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |v| {
        let h = matrix_from(dim, &v).hermitian_part();
        let fro = h.as_nalgebra().norm();
        if fro > bound {
            h.scale_real(bound / fro)
        } else {
            h
        }
    })
}

pub fn complex_vec(dim: usize) -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter("non-zero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| v.into_iter().map(|(a, b)| c64(a, b)).collect())
}
