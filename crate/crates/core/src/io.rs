//! JSON file formats for states, filters and measurements.
//!
//! State:
//! ```json
//! {"matrix": [[[re, im], ...4], ...4]}
//! {"pauli": {"a": [..3], "b": [..3], "T": [[..3], ..3]}}
//! ```
//! Filter: `{"x0": 1.5, "x": [0, 0, -0.5], "side": "A"}`.
//! Measurement: `{"theta": 0.3, "phi": 1.1}` with an optional
//! `"basis": [[[re, im], [re, im]], [[re, im], [re, im]]]`.

use std::path::Path;

use num_complex::Complex64;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtering::FilterOperator;
use crate::linalg::Matrix4;
use crate::measurement::DichotomicMeasurement;
use crate::state::{Mat3, TwoQubitState, Vec3};

type Pair = [f64; 2];

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PauliForm {
    a: Vec3,
    b: Vec3,
    #[serde(rename = "T")]
    t: Mat3,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<[[Pair; 4]; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pauli: Option<PauliForm>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasurementFile {
    theta: f64,
    phi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    basis: Option<[[Pair; 2]; 2]>,
}

fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        // Validation errors raised inside `try_from` arrive as serde custom
        // messages; keep them readable.
        Error::Format(e.to_string())
    })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn parse_state(text: &str) -> Result<TwoQubitState> {
    let file: StateFile = from_json(text)?;
    match (file.matrix, file.pauli) {
        (Some(m), None) => {
            let rows = m.map(|row| row.map(|[re, im]| Complex64::new(re, im)));
            TwoQubitState::from_density_matrix(&Matrix4::from_rows(rows))
        }
        (None, Some(p)) => TwoQubitState::from_pauli(p.a, p.b, p.t),
        (Some(_), Some(_)) => Err(Error::Format(
            "state file must contain exactly one of \"matrix\" and \"pauli\", found both".into(),
        )),
        (None, None) => Err(Error::Format(
            "state file must contain exactly one of \"matrix\" and \"pauli\"".into(),
        )),
    }
}

/// Writes the density matrix form, which round-trips exactly.
pub fn state_to_json(s: &TwoQubitState) -> String {
    let file = StateFile {
        matrix: Some(s.rho().entries().map(|row| row.map(|z| [z.re, z.im]))),
        pauli: None,
    };
    serde_json::to_string_pretty(&file).expect("plain numeric data")
}

pub fn read_state(path: impl AsRef<Path>) -> Result<TwoQubitState> {
    parse_state(&read(path.as_ref())?)
}

pub fn write_state(path: impl AsRef<Path>, s: &TwoQubitState) -> Result<()> {
    write(path.as_ref(), &(state_to_json(s) + "\n"))
}

pub fn parse_filter(text: &str) -> Result<FilterOperator> {
    from_json(text)
}

pub fn filter_to_json(f: &FilterOperator) -> String {
    serde_json::to_string_pretty(f).expect("plain numeric data")
}

pub fn read_filter(path: impl AsRef<Path>) -> Result<FilterOperator> {
    parse_filter(&read(path.as_ref())?)
}

pub fn write_filter(path: impl AsRef<Path>, f: &FilterOperator) -> Result<()> {
    write(path.as_ref(), &(filter_to_json(f) + "\n"))
}

pub fn parse_measurement(text: &str) -> Result<DichotomicMeasurement> {
    let file: MeasurementFile = from_json(text)?;
    match file.basis {
        Some(b) => {
            let basis = b.map(|v| v.map(|[re, im]| Complex64::new(re, im)));
            DichotomicMeasurement::new(basis, file.theta, file.phi)
        }
        None => DichotomicMeasurement::from_angles(file.theta, file.phi),
    }
}

pub fn measurement_to_json(m: &DichotomicMeasurement) -> String {
    let file = MeasurementFile {
        theta: m.theta(),
        phi: m.phi(),
        basis: Some(m.basis().map(|v| v.map(|z| [z.re, z.im]))),
    };
    serde_json::to_string_pretty(&file).expect("plain numeric data")
}

pub fn read_measurement(path: impl AsRef<Path>) -> Result<DichotomicMeasurement> {
    parse_measurement(&read(path.as_ref())?)
}
