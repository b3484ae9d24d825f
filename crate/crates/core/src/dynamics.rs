//! Unitary evolution of a scheme and detection of premeasurement instants,
//! i.e. times at which orthogonal system states are perfectly correlated with
//! orthogonal pointer states.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{MeasurementScheme, PointerBasis, PureState, QubitBasis};

/// `exp(-i H t)|Ψ₀⟩`.
pub fn evolve(scheme: &MeasurementScheme, t: f64) -> Result<PureState> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "evolution time {t} must be finite and ≥ 0"
        )));
    }
    scheme.initial_state().evolve_by(&scheme.propagator().at(t))
}

/// Correlation of a two-qubit state with a product basis `φ_i ⊗ ψ'_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationReport {
    /// `c[i][j] = ⟨φ_i ⊗ ψ'_j | Ψ⟩`.
    pub coefficients: [[Complex64; 2]; 2],
    pub is_premeasurement: bool,
    /// `pairing[i] = j` when `φ_i` is correlated with `ψ'_j`.
    pub pairing: Option<[usize; 2]>,
    /// `1 − √(off-pattern mass)` for the best pairing.
    pub score: f64,
    /// Weight outside the best pairing.
    pub off_pattern_mass: f64,
}

const IDENTITY: [usize; 2] = [0, 1];
const SWAP: [usize; 2] = [1, 0];

pub fn correlation_report(
    state: &PureState,
    system_basis: &QubitBasis,
    pointer: &PointerBasis,
    tol: f64,
) -> Result<CorrelationReport> {
    if state.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: state.dim(),
        });
    }
    let psi = state.amplitudes();
    let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in c.iter_mut().enumerate() {
        let phi = system_basis.vector(i);
        for (j, cij) in row.iter_mut().enumerate() {
            let chi = pointer.vector(j);
            *cij = (0..2)
                .flat_map(|a| (0..2).map(move |b| (a, b)))
                .map(|(a, b)| (phi[a] * chi[b]).conj() * psi[2 * a + b])
                .sum();
        }
    }

    let mass = |i: usize, j: usize| c[i][j].norm_sqr();
    let captured = |p: [usize; 2]| mass(0, p[0]) + mass(1, p[1]);
    let best = if captured(IDENTITY) >= captured(SWAP) {
        IDENTITY
    } else {
        SWAP
    };
    let off_pattern_mass = mass(0, 1 - best[0]) + mass(1, 1 - best[1]);
    let score = (1.0 - off_pattern_mass.sqrt()).clamp(0.0, 1.0);

    let above = |i: usize, j: usize| c[i][j].norm() >= tol;
    let rows_ok = (0..2).all(|i| (0..2).filter(|&j| above(i, j)).count() == 1);
    let cols_ok = (0..2).all(|j| (0..2).filter(|&i| above(i, j)).count() == 1);
    let pairing = if rows_ok && cols_ok {
        Some(if above(0, 0) { IDENTITY } else { SWAP })
    } else {
        None
    };

    Ok(CorrelationReport {
        coefficients: c,
        is_premeasurement: pairing.is_some(),
        pairing,
        score,
        off_pattern_mass,
    })
}

/// Half-open grid `t_start + k·step < t_end`.
pub fn grid_points(t_start: f64, t_end: f64, step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidArgument(format!("scan step {step} must be positive")));
    }
    if !(t_start.is_finite() && t_end.is_finite()) {
        return Err(Error::InvalidArgument("scan bounds must be finite".into()));
    }
    let mut out = Vec::new();
    let mut k = 0u64;
    loop {
        let t = t_start + k as f64 * step;
        if t >= t_end {
            break;
        }
        out.push(t);
        k += 1;
    }
    Ok(out)
}

/// Premeasurement instants of a scheme on a time grid.
///
/// Runs of consecutive flagged grid points are merged into one instant at the
/// run's midpoint, carrying the report of the point with least off-pattern
/// mass.
pub fn scan_premeasurement(
    scheme: &MeasurementScheme,
    t_start: f64,
    t_end: f64,
    step: f64,
    tol: f64,
) -> Result<Vec<(f64, CorrelationReport)>> {
    let grid = grid_points(t_start, t_end, step)?;
    let mut reports = Vec::with_capacity(grid.len());
    for &t in &grid {
        let state = evolve(scheme, t)?;
        reports.push(correlation_report(
            &state,
            scheme.system_basis(),
            scheme.pointer(),
            tol,
        )?);
    }

    let mut instants = Vec::new();
    let mut k = 0;
    while k < grid.len() {
        if !reports[k].is_premeasurement {
            k += 1;
            continue;
        }
        let start = k;
        while k < grid.len() && reports[k].is_premeasurement {
            k += 1;
        }
        let run = start..k;
        let best = run
            .clone()
            .min_by(|&a, &b| reports[a].off_pattern_mass.total_cmp(&reports[b].off_pattern_mass))
            .expect("non-empty run");
        let mid = 0.5 * (grid[run.start] + grid[run.end - 1]);
        instants.push((mid, reports[best].clone()));
    }
    Ok(instants)
}
