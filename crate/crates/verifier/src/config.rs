//! Scenario files and named tolerances.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use infokahler::{Alpha, BilinearObservable, ComplexMatrixF64, MarkovMapF64, MatrixF64, PhasePointF64, SplitMapF64};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 42;

/// A single invalid field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// All problems found while loading or validating a scenario.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ConfigError {
    pub errors: Vec<FieldError>,
}

impl ConfigError {
    pub fn single(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            errors: vec![FieldError {
                field: field.into(),
                message: message.into(),
            }],
        }
    }

    pub fn has_field(&self, field: &str) -> bool {
        self.errors.iter().any(|e| e.field == field)
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration")?;
        for e in &self.errors {
            write!(f, "\n  {e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    /// `H = 0`.
    Zero,
    /// Nearest-neighbour hopping, `H_{i,i+1} = H_{i+1,i} = 1`.
    Hopping,
    /// `H = diag(0, 1, ..., n-1)`.
    Ladder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HamiltonianSpec {
    /// Rows of `[re, im]` pairs.
    Matrix {
        hermitian_matrix: Vec<Vec<[f64; 2]>>,
    },
    Builtin {
        builtin: Builtin,
    },
}

impl Default for HamiltonianSpec {
    fn default() -> Self {
        HamiltonianSpec::Builtin {
            builtin: Builtin::Hopping,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    /// Splits component `index` (default: the last one) into fractions `k`, `1 - k`.
    Split {
        k: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        index: Option<usize>,
    },
    General {
        partition: Vec<Vec<usize>>,
        q: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub p: Vec<f64>,
    pub s: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BCandidates {
    Scalar,
    OffDiagonal,
    #[default]
    Both,
}

fn default_n() -> usize {
    3
}
fn default_alpha() -> f64 {
    1.0
}
fn default_a() -> f64 {
    1.0
}
fn default_k() -> Vec<f64> {
    vec![0.2, 0.5, 0.8]
}
fn default_trials() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_a")]
    pub a_param: f64,
    #[serde(default = "default_k")]
    pub k_values: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tol: BTreeMap<String, f64>,
    #[serde(default)]
    pub hamiltonian: HamiltonianSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<MapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialState>,
    #[serde(default)]
    pub b_candidates: BCandidates,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            n: default_n(),
            alpha: default_alpha(),
            a_param: default_a(),
            k_values: default_k(),
            trials: default_trials(),
            seed: None,
            tol: BTreeMap::new(),
            hamiltonian: HamiltonianSpec::default(),
            maps: Vec::new(),
            initial: None,
            b_candidates: BCandidates::default(),
        }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::single("scenario", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::single("scenario", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks every field and reports all violations at once.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut errors = Vec::new();
        let mut fail = |field: String, message: String| errors.push(FieldError { field, message });

        if self.n == 0 {
            fail("n".into(), "dimension must be at least 1".into());
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            fail(
                "alpha".into(),
                format!("must be positive and finite, got {}", self.alpha),
            );
        }
        if !self.a_param.is_finite() {
            fail("a_param".into(), "must be finite".into());
        }
        if self.k_values.is_empty() {
            fail("k_values".into(), "at least one split parameter is required".into());
        }
        for (i, k) in self.k_values.iter().enumerate() {
            if !(*k > 0.0 && *k < 1.0) {
                fail(format!("k_values[{i}]"), format!("must lie in (0, 1), got {k}"));
            }
        }
        if self.trials == 0 {
            fail("trials".into(), "must be at least 1".into());
        }
        for (name, value) in &self.tol {
            if Tolerances::default_value(name).is_none() {
                fail(format!("tol.{name}"), "unknown tolerance name".into());
            } else if !(value.is_finite() && *value > 0.0) {
                fail(
                    format!("tol.{name}"),
                    format!("must be positive and finite, got {value}"),
                );
            }
        }
        if self.n > 0 {
            if let Err(msg) = self.hamiltonian_matrix_checked() {
                fail("hamiltonian".into(), msg);
            }
        }
        for (i, m) in self.maps.iter().enumerate() {
            if let Err(msg) = map_from_spec(m, self.n) {
                fail(format!("maps[{i}]"), msg);
            }
        }
        if let Some(init) = &self.initial {
            if init.p.len() != self.n || init.s.len() != self.n {
                fail("initial".into(), format!("p and s must both have length {}", self.n));
            } else if let Err(e) = PhasePointF64::from_vecs(init.p.clone(), init.s.clone()) {
                fail("initial.p".into(), e.to_string());
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { errors })
        }
    }

    pub fn alpha(&self) -> Alpha<f64> {
        Alpha::new(self.alpha).expect("validated scenario")
    }

    /// Seed precedence: scenario value, then `INFOKAHLER_SEED`, then [`DEFAULT_SEED`].
    pub fn resolved_seed(&self) -> Result<u64, ConfigError> {
        if let Some(seed) = self.seed {
            return Ok(seed);
        }
        match std::env::var("INFOKAHLER_SEED") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| ConfigError::single("INFOKAHLER_SEED", format!("not a 64-bit unsigned integer: {v:?}"))),
            Err(_) => Ok(DEFAULT_SEED),
        }
    }

    fn hamiltonian_matrix_checked(&self) -> Result<ComplexMatrixF64, String> {
        let n = self.n;
        let m = match &self.hamiltonian {
            HamiltonianSpec::Builtin { builtin } => builtin_matrix(*builtin, n),
            HamiltonianSpec::Matrix { hermitian_matrix } => {
                if hermitian_matrix.len() != n || hermitian_matrix.iter().any(|r| r.len() != n) {
                    return Err(format!("hermitian_matrix must be {n} x {n}"));
                }
                let rows: Vec<Vec<Complex<f64>>> = hermitian_matrix
                    .iter()
                    .map(|r| r.iter().map(|[re, im]| Complex::new(*re, *im)).collect())
                    .collect();
                ComplexMatrixF64::from_rows(&rows)
            }
        };
        if !m.is_finite() {
            return Err("entries must be finite".into());
        }
        let residual = m.hermitian_residual();
        if residual > 1e-12 {
            return Err(format!("matrix is not Hermitian (residual {residual:e})"));
        }
        Ok(m)
    }

    /// The Hamiltonian matrix of a validated scenario.
    pub fn hamiltonian_matrix(&self) -> ComplexMatrixF64 {
        self.hamiltonian_matrix_checked().expect("validated scenario")
    }

    pub fn hamiltonian(&self) -> BilinearObservable<f64> {
        BilinearObservable::new(self.hamiltonian_matrix(), self.alpha()).expect("validated scenario")
    }

    pub fn markov_maps(&self) -> Vec<MarkovMapF64> {
        self.maps
            .iter()
            .map(|m| map_from_spec(m, self.n).expect("validated scenario"))
            .collect()
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances::with_overrides(&self.tol)
    }
}

pub fn builtin_matrix(builtin: Builtin, n: usize) -> ComplexMatrixF64 {
    let re = match builtin {
        Builtin::Zero => MatrixF64::zeros(n, n),
        Builtin::Hopping => MatrixF64::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { 1.0 } else { 0.0 }),
        Builtin::Ladder => MatrixF64::from_fn(n, n, |i, j| if i == j { i as f64 } else { 0.0 }),
    };
    ComplexMatrixF64::from_real(re)
}

fn map_from_spec(spec: &MapSpec, n: usize) -> Result<MarkovMapF64, String> {
    match spec {
        MapSpec::Split { k, index } => {
            let index = index.unwrap_or(n.saturating_sub(1));
            SplitMapF64::new(n, *k, index)
                .map(|s| s.to_markov_map())
                .map_err(|e| e.to_string())
        }
        MapSpec::General { partition, q } => {
            if partition.len() != n {
                return Err(format!("partition must have {n} cells"));
            }
            if q.len() != n || q.iter().any(|r| r.len() != q[0].len()) {
                return Err("q must be a rectangular matrix with one row per cell".into());
            }
            MarkovMapF64::new(partition.clone(), MatrixF64::from_rows(q)).map_err(|e| e.to_string())
        }
    }
}

/// Named tolerances with their defaults.
const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("simplex_line_element", 1e-14),
    ("simplex_alpha_linearity", 1e-14),
    ("markov_preservation", 1e-12),
    ("markov_total", 1e-14),
    ("markov_flat_threshold", 1e-3),
    ("markov_flat_fraction", 0.95),
    ("phase_antisymmetry", 1e-12),
    ("phase_jacobi", 1e-8),
    ("phase_norm_drift", 1e-9),
    ("phase_gauge", 1e-10),
    ("kahler_residual", 1e-12),
    ("gmm_symplectic", 1e-13),
    ("gmm_roundtrip", 1e-14),
    ("gmm_constraint", 1e-12),
    ("gmm_generating", 1e-9),
    ("dynamics_discrepancy", 1e-8),
    ("dynamics_drift", 1e-10),
    ("uniqueness_scalar", 1e-12),
    ("uniqueness_falsification", 1e-6),
    ("complex_flat", 1e-8),
    ("complex_schrodinger", 1e-8),
    ("complex_dirac_drift", 1e-8),
    ("complex_line_element", 1e-8),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    values: BTreeMap<String, f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            values: DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

impl Tolerances {
    pub fn names() -> impl Iterator<Item = &'static str> {
        DEFAULT_TOLERANCES.iter().map(|(k, _)| *k)
    }

    pub fn default_value(name: &str) -> Option<f64> {
        DEFAULT_TOLERANCES.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }

    pub fn with_overrides(overrides: &BTreeMap<String, f64>) -> Self {
        let mut t = Self::default();
        for (k, v) in overrides {
            if t.values.contains_key(k) {
                t.values.insert(k.clone(), *v);
            }
        }
        t
    }

    pub fn get(&self, name: &str) -> f64 {
        *self
            .values
            .get(name)
            .unwrap_or_else(|| panic!("unknown tolerance {name}"))
    }
}

/// Parses `NAME=REAL`.
pub fn parse_tolerance_override(arg: &str) -> Result<(String, f64), String> {
    let (name, value) = arg
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=REAL, got {arg:?}"))?;
    let value: f64 = value.trim().parse().map_err(|_| format!("not a number: {value:?}"))?;
    Ok((name.trim().to_string(), value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        Scenario::default().validate().unwrap();
    }

    #[test]
    fn zero_dimension_is_rejected() {
        let s = Scenario {
            n: 0,
            ..Scenario::default()
        };
        let err = s.validate().unwrap_err();
        assert!(err.has_field("n"));
    }

    #[test]
    fn errors_are_collected_per_field() {
        let s = Scenario {
            alpha: -1.0,
            k_values: vec![0.5, 1.0],
            trials: 0,
            tol: [("bogus".to_string(), 1.0), ("kahler_residual".to_string(), 0.0)].into(),
            ..Scenario::default()
        };
        let err = s.validate().unwrap_err();
        for field in ["alpha", "k_values[1]", "trials", "tol.bogus", "tol.kahler_residual"] {
            assert!(err.has_field(field), "{field} missing from {err}");
        }
    }

    #[test]
    fn non_hermitian_matrix_is_rejected() {
        let text = r#"{"n": 2, "hamiltonian": {"hermitian_matrix": [[[0,0],[1,0]],[[0,0],[0,0]]]}}"#;
        let s = Scenario::from_json(text).unwrap();
        assert!(s.validate().unwrap_err().has_field("hamiltonian"));
    }

    #[test]
    fn parses_full_scenario() {
        let text = r#"{
            "n": 2, "alpha": 0.5, "a_param": 0.3, "k_values": [0.25], "trials": 7, "seed": 9,
            "tol": {"kahler_residual": 1e-11},
            "hamiltonian": {"hermitian_matrix": [[[0,0],[1,0]],[[1,0],[0,0]]]},
            "maps": [{"type": "split", "k": 0.4}, {"type": "general", "partition": [[0],[1,2]], "q": [[1,0,0],[0,0.3,0.7]]}],
            "initial": {"p": [0.8, 0.2], "s": [0, 0]},
            "b_candidates": "off-diagonal"
        }"#;
        let s = Scenario::from_json(text).unwrap();
        s.validate().unwrap();
        assert_eq!(s.markov_maps().len(), 2);
        assert_eq!(s.tolerances().get("kahler_residual"), 1e-11);
        assert_eq!(s.resolved_seed().unwrap(), 9);
        assert_eq!(s.b_candidates, BCandidates::OffDiagonal);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = Scenario::from_json(r#"{"n": 2, "dimension": 3}"#).unwrap_err();
        assert!(err.to_string().contains("dimension"));
    }

    #[test]
    fn tolerance_override_syntax() {
        assert_eq!(
            parse_tolerance_override("kahler_residual=1e-10").unwrap(),
            ("kahler_residual".to_string(), 1e-10)
        );
        assert!(parse_tolerance_override("kahler_residual").is_err());
        assert!(parse_tolerance_override("x=abc").is_err());
    }
}
