//! Machine-readable run reports. Energies are in multiples of h and every
//! number is rounded to 12 significant digits before it is stored, so a
//! report survives a JSON round trip unchanged.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::collapse::{CycleLedger, EnergyLedger};

/// Magnitudes below this are reported as zero.
pub const REPORT_FLOOR: f64 = 1e-12;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits, flushing values below
/// [`REPORT_FLOOR`] to zero.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    if x.abs() < REPORT_FLOOR {
        return 0.0;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub branch: usize,
    pub probability: f64,
    pub energy_h: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerRecord {
    pub collapse_time: f64,
    pub e_pre_h: f64,
    pub e_post_h: f64,
    pub cross_h: f64,
    pub delta_h: f64,
    pub branches: Vec<BranchRecord>,
}

impl From<&EnergyLedger> for LedgerRecord {
    fn from(l: &EnergyLedger) -> Self {
        LedgerRecord {
            collapse_time: round_sig(l.t_collapse),
            e_pre_h: round_sig(l.e_pre_h()),
            e_post_h: round_sig(l.e_post_h()),
            cross_h: round_sig(l.cross_h()),
            delta_h: round_sig(l.delta_h()),
            branches: l
                .outcomes
                .iter()
                .map(|o| BranchRecord {
                    branch: o.branch,
                    probability: round_sig(o.probability),
                    energy_h: round_sig(crate::units::to_h(o.branch_energy)),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub cycles: u64,
    pub collapse_time: f64,
    pub delta_h: f64,
    pub cumulative_h: f64,
}

impl From<&CycleLedger> for CycleRecord {
    fn from(c: &CycleLedger) -> Self {
        CycleRecord {
            cycles: c.cycles,
            collapse_time: round_sig(c.per_cycle.t_collapse),
            delta_h: round_sig(c.per_cycle.delta_h()),
            cumulative_h: round_sig(c.cumulative_h()),
        }
    }
}

/// A named numeric comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    /// `|actual − expected| ≤ tolerance`, evaluated before rounding.
    pub fn new(name: impl Into<String>, expected: f64, actual: f64, tolerance: f64) -> Self {
        CheckRecord {
            name: name.into(),
            pass: (actual - expected).abs() <= tolerance,
            expected: round_sig(expected),
            actual: round_sig(actual),
            tolerance,
        }
    }

    /// An error magnitude that must not exceed `tolerance`.
    pub fn error(name: impl Into<String>, error: f64, tolerance: f64) -> Self {
        CheckRecord {
            name: name.into(),
            pass: error <= tolerance,
            expected: 0.0,
            actual: error,
            tolerance,
        }
    }
}

/// One grid point of a collapse-time scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub t: f64,
    pub e_pre_h: f64,
    pub e_post_h: f64,
    pub delta_h: f64,
    pub score: f64,
    pub is_premeasurement: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// Echo of the normalized configuration.
    pub config: serde_json::Value,
    pub ledgers: Vec<LedgerRecord>,
    #[serde(default)]
    pub premeasurement_instants: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycles: Option<CycleRecord>,
    /// Label → coefficient in multiples of h.
    #[serde(default)]
    pub pauli_h: BTreeMap<String, f64>,
    #[serde(default)]
    pub hamiltonian_eigenvalues_h: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scan: Vec<ScanRow>,
}

impl RunReport {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// Flattened ledger row used by the CSV form of `run`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerCsvRow {
    pub collapse_time: f64,
    pub branch: usize,
    pub probability: f64,
    pub branch_energy_h: f64,
    pub e_pre_h: f64,
    pub e_post_h: f64,
    pub cross_h: f64,
    pub delta_h: f64,
}

pub fn ledger_rows(report: &RunReport) -> Vec<LedgerCsvRow> {
    report
        .ledgers
        .iter()
        .flat_map(|l| {
            l.branches.iter().map(move |b| LedgerCsvRow {
                collapse_time: l.collapse_time,
                branch: b.branch,
                probability: b.probability,
                branch_energy_h: b.energy_h,
                e_pre_h: l.e_pre_h,
                e_post_h: l.e_post_h,
                cross_h: l.cross_h,
                delta_h: l.delta_h,
            })
        })
        .collect()
}

pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>, R: Read>(input: R) -> csv::Result<Vec<T>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.125), 0.125);
        assert_eq!(round_sig(1e-17), 0.0);
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(123_456_789.123_456_7), 123_456_789.123);
        assert_eq!(round_sig(-2.0 / 3.0), -0.666666666667);
    }

    fn row_strategy() -> impl Strategy<Value = ScanRow> {
        (0.0f64..8.0, -1.0f64..1.0, -1.0f64..1.0, 0.0f64..1.0, any::<bool>()).prop_map(|(t, a, b, s, f)| ScanRow {
            t: round_sig(t),
            e_pre_h: round_sig(a),
            e_post_h: round_sig(b),
            delta_h: round_sig(b - a),
            score: round_sig(s),
            is_premeasurement: f,
        })
    }

    proptest! {
        #[test]
        fn rounding_is_idempotent(x in -1e6f64..1e6) {
            prop_assert_eq!(round_sig(round_sig(x)), round_sig(x));
        }

        #[test]
        fn scan_rows_survive_csv_and_json(rows in proptest::collection::vec(row_strategy(), 0..20)) {
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf).unwrap();
            let back: Vec<ScanRow> = read_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(&back, &rows);

            let report = RunReport {
                command: "scan".into(),
                config: serde_json::json!({"collapse_time": 1.0}),
                ledgers: vec![],
                premeasurement_instants: rows.iter().map(|r| r.t).collect(),
                cycles: None,
                pauli_h: BTreeMap::new(),
                hamiltonian_eigenvalues_h: vec![],
                checks: vec![],
                scan: rows,
            };
            prop_assert_eq!(RunReport::from_json(&report.to_json()).unwrap(), report);
        }
    }
}
