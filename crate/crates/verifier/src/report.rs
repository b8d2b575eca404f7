//! Verification reports.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

/// How a residual is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    /// `residual < tolerance`
    Below,
    /// `residual <= tolerance`
    AtMost,
    /// `residual > tolerance`, for falsification controls
    Above,
    /// `residual >= tolerance`
    AtLeast,
}

impl Expectation {
    pub fn holds(self, residual: f64, tolerance: f64) -> bool {
        match self {
            Expectation::Below => residual < tolerance,
            Expectation::AtMost => residual <= tolerance,
            Expectation::Above => residual > tolerance,
            Expectation::AtLeast => residual >= tolerance,
        }
    }
}

// JSON has no representation for non-finite numbers; they are written as null.
fn serialize_real<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

fn deserialize_real<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub check_id: String,
    pub params: BTreeMap<String, Value>,
    #[serde(serialize_with = "serialize_real", deserialize_with = "deserialize_real")]
    pub residual: f64,
    pub tolerance: f64,
    pub expect: Expectation,
    pub pass: bool,
}

impl Record {
    pub fn new(check_id: impl Into<String>, params: Value, residual: f64, tolerance: f64, expect: Expectation) -> Self {
        let params = match params {
            Value::Object(map) => map.into_iter().collect(),
            Value::Null => BTreeMap::new(),
            other => BTreeMap::from([("value".to_string(), other)]),
        };
        Self {
            check_id: check_id.into(),
            params,
            residual,
            tolerance,
            expect,
            pass: !residual.is_nan() && expect.holds(residual, tolerance),
        }
    }

    pub fn below(check_id: impl Into<String>, params: Value, residual: f64, tolerance: f64) -> Self {
        Self::new(check_id, params, residual, tolerance, Expectation::Below)
    }

    pub fn above(check_id: impl Into<String>, params: Value, residual: f64, tolerance: f64) -> Self {
        Self::new(check_id, params, residual, tolerance, Expectation::Above)
    }

    /// A check that could not be evaluated.
    pub fn error(check_id: impl Into<String>, params: Value, tolerance: f64, message: String) -> Self {
        let mut r = Self::new(check_id, params, f64::NAN, tolerance, Expectation::Below);
        r.params.insert("error".into(), Value::String(message));
        r.pass = false;
        r
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Environment {
    pub seed: u64,
    pub version: String,
    /// Seconds since the Unix epoch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub environment: Environment,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn new(seed: u64, records: Vec<Record>) -> Self {
        let passed = records.iter().filter(|r| r.pass).count();
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
        Self {
            environment: Environment {
                seed,
                version: env!("CARGO_PKG_VERSION").to_string(),
                timestamp,
            },
            summary: Summary {
                total: records.len(),
                passed,
                failed: records.len() - passed,
            },
            records,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn is_consistent(&self) -> bool {
        let passed = self.records.iter().filter(|r| r.pass).count();
        self.summary.total == self.records.len()
            && self.summary.passed == passed
            && self.summary.failed == self.records.len() - passed
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report without its timestamp; identical for identical inputs.
    pub fn body_json(&self) -> String {
        let mut body = self.clone();
        body.environment.timestamp = None;
        body.to_json()
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn record(&self, check_id: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.check_id == check_id)
    }

    /// One line per record.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let status = if r.pass { "PASS" } else { "FAIL" };
            let op = match r.expect {
                Expectation::Below => "<",
                Expectation::AtMost => "<=",
                Expectation::Above => ">",
                Expectation::AtLeast => ">=",
            };
            out.push_str(&format!(
                "{status}  {:<40} residual {:.3e} {op} {:.1e}\n",
                r.check_id, r.residual, r.tolerance
            ));
        }
        out.push_str(&format!(
            "{} checks, {} passed, {} failed (seed {})\n",
            self.summary.total, self.summary.passed, self.summary.failed, self.environment.seed
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn summary_matches_records() {
        let records = vec![
            Record::below("a", json!({"n": 2}), 1e-15, 1e-12),
            Record::above("b", Value::Null, 1e-8, 1e-6),
            Record::below("c", Value::Null, f64::NAN, 1.0),
        ];
        let r = Report::new(1, records);
        assert_eq!(
            r.summary,
            Summary {
                total: 3,
                passed: 1,
                failed: 2
            }
        );
        assert!(r.is_consistent());
        assert!(!r.all_passed());
    }

    #[test]
    fn roundtrip_is_exact() {
        let r = Report::new(
            7,
            vec![
                Record::below("x", json!({"k": 0.1}), 0.1 + 0.2, 1e-12),
                Record::below("y", Value::Null, f64::INFINITY, 1e-12),
            ],
        );
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back.records[0].residual.to_bits(), (0.1f64 + 0.2).to_bits());
        assert!(back.records[1].residual.is_nan());
        assert!(!back.body_json().contains("timestamp"));
    }
}
