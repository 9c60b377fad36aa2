//! On-disk formats: state files, ensemble files, and run reports.
//!
//! Complex entries are serialized as `[re, im]` pairs, row-major, UTF-8
//! JSON. Reports carry a determinism hash over everything except the timing
//! field, so re-runs with identical inputs and seeds can be compared byte
//! for byte.

use std::collections::BTreeMap;
use std::path::Path;

use entdist::linalg::{CMat, CVec};
use entdist::decomposition::PureEnsemble;
use entdist::states::{DensityMatrix, PureState};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: schema error at line {line}, column {column}: {message}")]
    Schema {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {field}: {message}")]
    Field {
        path: String,
        field: &'static str,
        message: String,
    },

    #[error("{path}: invariant violated: {0}", .source)]
    Invariant {
        path: String,
        #[source]
        source: entdist::Error,
    },

    #[error(transparent)]
    Lib(#[from] entdist::Error),
}

impl CliError {
    /// Process exit code: 2 for input problems, 3 for infeasibility.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(entdist::Error::Infeasible(_)) => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    /// "pure" (matrix holds the amplitude vector) or "mixed" (row-major
    /// density matrix).
    pub kind: String,
    pub matrix: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subnormalized: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleMemberFile {
    pub weight: f64,
    pub state: StateFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub members: Vec<EnsembleMemberFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// A parsed state, preserving whether the file declared it pure.
#[derive(Debug, Clone)]
pub enum ParsedState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl ParsedState {
    pub fn to_density(&self) -> DensityMatrix {
        match self {
            ParsedState::Pure(phi) => phi.to_density(),
            ParsedState::Mixed(rho) => rho.clone(),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn state_from_file(path: &Path, file: &StateFile) -> CliResult<ParsedState> {
    let total: usize = file.dims.iter().product();
    let subnormalized = file.subnormalized.unwrap_or(false);
    match file.kind.as_str() {
        "pure" => {
            if file.matrix.len() != total {
                return Err(CliError::Field {
                    path: path.display().to_string(),
                    field: "matrix",
                    message: format!(
                        "pure state needs {total} amplitudes, found {}",
                        file.matrix.len()
                    ),
                });
            }
            let amps = CVec::from_iterator(
                total,
                file.matrix.iter().map(|[re, im]| C64::new(*re, *im)),
            );
            let norm = amps.norm();
            if !subnormalized && (norm - 1.0).abs() > 1e-6 {
                return Err(CliError::Invariant {
                    path: path.display().to_string(),
                    source: entdist::Error::InvalidTrace {
                        got: norm * norm,
                        expected: "unit norm (set subnormalized to allow less)",
                    },
                });
            }
            let state =
                PureState::new(file.dims.clone(), amps).map_err(|source| CliError::Invariant {
                    path: path.display().to_string(),
                    source,
                })?;
            Ok(ParsedState::Pure(state))
        }
        "mixed" => {
            if file.matrix.len() != total * total {
                return Err(CliError::Field {
                    path: path.display().to_string(),
                    field: "matrix",
                    message: format!(
                        "mixed state needs {} entries, found {}",
                        total * total,
                        file.matrix.len()
                    ),
                });
            }
            let mat = CMat::from_fn(total, total, |i, j| {
                let [re, im] = file.matrix[i * total + j];
                C64::new(re, im)
            });
            let state = if subnormalized {
                DensityMatrix::new_subnormalized(file.dims.clone(), mat)
            } else {
                DensityMatrix::new(file.dims.clone(), mat)
            }
            .map_err(|source| CliError::Invariant {
                path: path.display().to_string(),
                source,
            })?;
            Ok(ParsedState::Mixed(state))
        }
        other => Err(CliError::Field {
            path: path.display().to_string(),
            field: "kind",
            message: format!("expected \"pure\" or \"mixed\", found \"{other}\""),
        }),
    }
}

pub fn parse_state_file(path: &Path) -> CliResult<ParsedState> {
    let file: StateFile = read_json(path)?;
    state_from_file(path, &file)
}

pub fn parse_ensemble_file(path: &Path) -> CliResult<PureEnsemble> {
    let file: EnsembleFile = read_json(path)?;
    let mut members = Vec::with_capacity(file.members.len());
    for (idx, member) in file.members.iter().enumerate() {
        let state = match state_from_file(path, &member.state)? {
            ParsedState::Pure(phi) => phi,
            ParsedState::Mixed(_) => {
                return Err(CliError::Field {
                    path: path.display().to_string(),
                    field: "members.state.kind",
                    message: format!("ensemble member {idx} must be pure"),
                })
            }
        };
        members.push((member.weight, state));
    }
    PureEnsemble::new(members).map_err(|source| CliError::Invariant {
        path: path.display().to_string(),
        source,
    })
}

pub fn pure_to_file(phi: &PureState, label: Option<String>) -> StateFile {
    StateFile {
        dims: phi.dims().to_vec(),
        kind: "pure".into(),
        matrix: phi.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        subnormalized: if phi.norm() < 1.0 - 1e-9 {
            Some(true)
        } else {
            None
        },
        label,
    }
}

pub fn density_to_file(rho: &DensityMatrix, label: Option<String>) -> StateFile {
    StateFile {
        dims: rho.dims().to_vec(),
        kind: "mixed".into(),
        matrix: rho
            .matrix()
            .row_iter()
            .flat_map(|row| row.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
            .collect(),
        subnormalized: if rho.is_subnormalized() { Some(true) } else { None },
        label,
    }
}

pub fn ensemble_to_file(ensemble: &PureEnsemble, label: Option<String>) -> EnsembleFile {
    EnsembleFile {
        members: ensemble
            .members()
            .iter()
            .map(|(w, phi)| EnsembleMemberFile {
                weight: *w,
                state: pure_to_file(phi, None),
            })
            .collect(),
        label,
    }
}

/// One result line: a (quantity, ε) pair with its bounds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub quantity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub eps_derived: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl ReportRow {
    pub fn new(quantity: &str) -> Self {
        ReportRow {
            quantity: quantity.into(),
            eps: None,
            eps_derived: BTreeMap::new(),
            lower: None,
            upper: None,
            witness_path: None,
            warning: None,
        }
    }

    pub fn value(quantity: &str, v: f64) -> Self {
        let mut row = Self::new(quantity);
        row.lower = finite_or_none(v);
        row.upper = finite_or_none(v);
        row
    }
}

/// JSON cannot carry ±∞; non-finite bounds become absent values and the
/// warning field says why.
pub fn finite_or_none(v: f64) -> Option<f64> {
    if v.is_finite() {
        Some(v)
    } else {
        None
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub argv: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub rows: Vec<ReportRow>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub extra: serde_json::Value,
    pub determinism_hash: String,
    pub timing_ms: u128,
}

impl RunReport {
    pub fn new(command: &str, argv: Vec<String>, seed: Option<u64>) -> Self {
        RunReport {
            command: command.into(),
            argv,
            seed,
            rows: Vec::new(),
            extra: serde_json::Value::Null,
            determinism_hash: String::new(),
            timing_ms: 0,
        }
    }

    /// Hash of the report content excluding timing (and the hash itself).
    pub fn compute_hash(&self) -> String {
        let payload = serde_json::json!({
            "command": self.command,
            "argv": self.argv,
            "seed": self.seed,
            "rows": self.rows,
            "extra": self.extra,
        });
        let bytes = serde_json::to_vec(&payload).expect("report serializes");
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        hex_string(&hasher.finalize())
    }

    pub fn finalize(&mut self, timing_ms: u128) {
        self.determinism_hash = self.compute_hash();
        self.timing_ms = timing_ms;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// CSV: one row per (quantity, eps).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,eps,eps_derived,lower,upper,witness_path\n");
        for row in &self.rows {
            let derived = row
                .eps_derived
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(";");
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.quantity,
                row.eps.map(|e| e.to_string()).unwrap_or_default(),
                derived,
                row.lower.map(|v| v.to_string()).unwrap_or_else(|| "inf".into()),
                row.upper.map(|v| v.to_string()).unwrap_or_else(|| "inf".into()),
                row.witness_path.clone().unwrap_or_default(),
            ));
        }
        out
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
