//! Scenario configuration: a JSON object of the form
//!
//! ```json
//! {
//!   "hamiltonian": "standard" | {"pauli": {"XI": -0.125, "YY": 0.125}},
//!   "initial_state": "standard" | [[re, im], [re, im], [re, im], [re, im]],
//!   "pointer_angles": [theta, phi],
//!   "collapse_time": 1.0,
//!   "scan": {"t_start": 0.0, "t_end": 4.0, "step": 0.001, "tol": 1e-6},
//!   "cycles": 10
//! }
//! ```
//!
//! Pauli coefficients are in multiples of h; the first letter of a key acts on
//! the system, the second on the detector. `pointer_angles` defaults to
//! `[0, 0]`, `scan` and `cycles` are optional.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::model::pauli_compose;
use crate::model::{standard, MeasurementScheme, PauliDecomposition, PointerBasis, PureState, QubitBasis};
use crate::units::from_h;

/// Amplitude vectors whose norm is off by more than this are renormalized
/// with a warning.
pub const RENORMALIZE_WARN: f64 = 1e-6;

pub const DEFAULT_SCAN_TOL: f64 = 1e-6;

/// A malformed or invalid configuration, tied to the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug, PartialEq)]
pub enum HamiltonianSpec {
    Standard,
    /// Two-letter label → coefficient in multiples of h.
    Pauli(BTreeMap<String, f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialStateSpec {
    Standard,
    Amplitudes([Complex64; 4]),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanSpec {
    pub t_start: f64,
    pub t_end: f64,
    pub step: f64,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub hamiltonian: HamiltonianSpec,
    pub initial_state: InitialStateSpec,
    pub pointer_angles: (f64, f64),
    pub collapse_time: f64,
    pub scan: Option<ScanSpec>,
    pub cycles: Option<u64>,
}

const KNOWN_KEYS: [&str; 6] = [
    "hamiltonian",
    "initial_state",
    "pointer_angles",
    "collapse_time",
    "scan",
    "cycles",
];

fn number(v: &Value, field: &str) -> Result<f64, ConfigError> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(ConfigError::new(field, format!("expected a finite number, found {v}"))),
    }
}

impl ScenarioConfig {
    /// The reference scheme collapsed at `t = 1` in the canonical pointer basis.
    pub fn standard() -> Self {
        ScenarioConfig {
            hamiltonian: HamiltonianSpec::Standard,
            initial_state: InitialStateSpec::Standard,
            pointer_angles: (0.0, 0.0),
            collapse_time: 1.0,
            scan: None,
            cycles: None,
        }
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("<file>", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::new("<document>", e.to_string()))?;
        Self::from_value(&value)
    }

    pub fn from_value(value: &Value) -> Result<Self, ConfigError> {
        let obj = value
            .as_object()
            .ok_or_else(|| ConfigError::new("<document>", "expected a JSON object"))?;
        if let Some(unknown) = obj.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(ConfigError::new(unknown.clone(), "unknown field"));
        }

        let hamiltonian = match obj.get("hamiltonian") {
            None => return Err(ConfigError::new("hamiltonian", "missing field")),
            Some(v) => parse_hamiltonian(v)?,
        };
        let initial_state = match obj.get("initial_state") {
            None => return Err(ConfigError::new("initial_state", "missing field")),
            Some(v) => parse_initial_state(v)?,
        };
        let pointer_angles = match obj.get("pointer_angles") {
            None => (0.0, 0.0),
            Some(v) => {
                let arr = v
                    .as_array()
                    .filter(|a| a.len() == 2)
                    .ok_or_else(|| ConfigError::new("pointer_angles", "expected [theta, phi]"))?;
                (number(&arr[0], "pointer_angles")?, number(&arr[1], "pointer_angles")?)
            }
        };
        let collapse_time = match obj.get("collapse_time") {
            None => return Err(ConfigError::new("collapse_time", "missing field")),
            Some(v) => number(v, "collapse_time")?,
        };
        if collapse_time < 0.0 {
            return Err(ConfigError::new("collapse_time", "must be ≥ 0"));
        }
        let scan = match obj.get("scan") {
            None | Some(Value::Null) => None,
            Some(v) => Some(parse_scan(v)?),
        };
        let cycles = match obj.get("cycles") {
            None | Some(Value::Null) => None,
            Some(v) => Some(
                v.as_u64()
                    .ok_or_else(|| ConfigError::new("cycles", format!("expected a non-negative integer, found {v}")))?,
            ),
        };
        Ok(ScenarioConfig {
            hamiltonian,
            initial_state,
            pointer_angles,
            collapse_time,
            scan,
            cycles,
        })
    }

    pub fn to_value(&self) -> Value {
        let mut obj = Map::new();
        obj.insert(
            "hamiltonian".into(),
            match &self.hamiltonian {
                HamiltonianSpec::Standard => json!("standard"),
                HamiltonianSpec::Pauli(map) => json!({ "pauli": map }),
            },
        );
        obj.insert(
            "initial_state".into(),
            match &self.initial_state {
                InitialStateSpec::Standard => json!("standard"),
                InitialStateSpec::Amplitudes(a) => Value::Array(a.iter().map(|z| json!([z.re, z.im])).collect()),
            },
        );
        obj.insert(
            "pointer_angles".into(),
            json!([self.pointer_angles.0, self.pointer_angles.1]),
        );
        obj.insert("collapse_time".into(), json!(self.collapse_time));
        if let Some(s) = &self.scan {
            obj.insert(
                "scan".into(),
                json!({"t_start": s.t_start, "t_end": s.t_end, "step": s.step, "tol": s.tol}),
            );
        }
        if let Some(n) = self.cycles {
            obj.insert("cycles".into(), json!(n));
        }
        Value::Object(obj)
    }

    /// Pauli coefficients in natural energy units.
    pub fn pauli(&self) -> PauliDecomposition {
        match &self.hamiltonian {
            HamiltonianSpec::Standard => standard::pauli(),
            HamiltonianSpec::Pauli(map) => {
                let mut d = PauliDecomposition::zero();
                for (label, &c) in map {
                    let (a, b) = PauliDecomposition::parse_label(label).expect("validated at parse time");
                    d.set(a, b, from_h(c));
                }
                d
            }
        }
    }

    pub fn build_scheme(&self) -> Result<MeasurementScheme, ConfigError> {
        let hamiltonian = match &self.hamiltonian {
            HamiltonianSpec::Standard => standard::hamiltonian(),
            HamiltonianSpec::Pauli(_) => pauli_compose(&self.pauli()),
        };
        let initial = match &self.initial_state {
            InitialStateSpec::Standard => standard::initial_state(),
            InitialStateSpec::Amplitudes(a) => {
                PureState::normalized(a.to_vec()).map_err(|e| ConfigError::new("initial_state", e.to_string()))?
            }
        };
        let (theta, phi) = self.pointer_angles;
        MeasurementScheme::new(
            hamiltonian,
            QubitBasis::canonical(),
            PointerBasis::from_bloch(theta, phi),
            initial,
            vec![self.collapse_time],
        )
        .map_err(|e| ConfigError::new("hamiltonian", e.to_string()))
    }
}

fn parse_hamiltonian(v: &Value) -> Result<HamiltonianSpec, ConfigError> {
    if v.as_str() == Some("standard") {
        return Ok(HamiltonianSpec::Standard);
    }
    let pauli = v
        .as_object()
        .and_then(|o| o.get("pauli"))
        .and_then(Value::as_object)
        .ok_or_else(|| ConfigError::new("hamiltonian", "expected \"standard\" or {\"pauli\": {...}}"))?;
    let mut map = BTreeMap::new();
    for (label, c) in pauli {
        let field = format!("hamiltonian.pauli.{label}");
        let (a, b) = PauliDecomposition::parse_label(label)
            .ok_or_else(|| ConfigError::new(&field, "expected a two-letter label over {I, X, Y, Z}"))?;
        let key = format!("{a}{b}");
        if map.insert(key, number(c, &field)?).is_some() {
            return Err(ConfigError::new(field, "duplicate label"));
        }
    }
    Ok(HamiltonianSpec::Pauli(map))
}

fn parse_initial_state(v: &Value) -> Result<InitialStateSpec, ConfigError> {
    if v.as_str() == Some("standard") {
        return Ok(InitialStateSpec::Standard);
    }
    let arr = v
        .as_array()
        .filter(|a| a.len() == 4)
        .ok_or_else(|| ConfigError::new("initial_state", "expected \"standard\" or four [re, im] pairs"))?;
    let mut amps = [Complex64::new(0.0, 0.0); 4];
    for (k, item) in arr.iter().enumerate() {
        let field = format!("initial_state[{k}]");
        let pair = item
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| ConfigError::new(&field, "expected [re, im]"))?;
        amps[k] = Complex64::new(number(&pair[0], &field)?, number(&pair[1], &field)?);
    }
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(ConfigError::new("initial_state", "amplitudes are all zero"));
    }
    if (norm - 1.0).abs() > RENORMALIZE_WARN {
        log::warn!("initial_state has norm {norm}; renormalizing");
    }
    Ok(InitialStateSpec::Amplitudes(amps.map(|z| z / norm)))
}

fn parse_scan(v: &Value) -> Result<ScanSpec, ConfigError> {
    let obj = v
        .as_object()
        .ok_or_else(|| ConfigError::new("scan", "expected an object"))?;
    let get = |key: &str| -> Result<f64, ConfigError> {
        let field = format!("scan.{key}");
        match obj.get(key) {
            None => Err(ConfigError::new(field, "missing field")),
            Some(x) => number(x, &field),
        }
    };
    let t_start = get("t_start")?;
    let t_end = get("t_end")?;
    let step = get("step")?;
    let tol = match obj.get("tol") {
        None => DEFAULT_SCAN_TOL,
        Some(x) => number(x, "scan.tol")?,
    };
    if t_start < 0.0 {
        return Err(ConfigError::new("scan.t_start", "must be ≥ 0"));
    }
    if t_end < t_start {
        return Err(ConfigError::new("scan.t_end", "must not precede t_start"));
    }
    if step <= 0.0 {
        return Err(ConfigError::new("scan.step", "must be positive"));
    }
    if tol <= 0.0 {
        return Err(ConfigError::new("scan.tol", "must be positive"));
    }
    Ok(ScanSpec {
        t_start,
        t_end,
        step,
        tol,
    })
}
