use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::fit::SlopeFit;
use crate::error::Result;
use crate::spectral::GridSpec;

/// Inputs needed to reproduce a record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the canonical JSON of `{study, config}`.
    pub config_hash: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub grid: GridSpec,
    pub dt: Option<f64>,
    pub version: String,
}

impl Provenance {
    pub fn new<C: Serialize>(study: &str, config: &C, seed: u64, grid: GridSpec, dt: Option<f64>) -> Result<Self> {
        let config = serde_json::to_value(config)?;
        Ok(Self {
            config_hash: config_hash(study, &config)?,
            config,
            seed,
            grid,
            dt,
            version: env!("CARGO_PKG_VERSION").to_string(),
        })
    }
}

/// Hex SHA-256 over the key-sorted JSON of `{"config": .., "study": ..}`.
pub fn config_hash(study: &str, config: &serde_json::Value) -> Result<String> {
    let canonical = serde_json::to_string(&serde_json::json!({ "study": study, "config": config }))?;
    Ok(hex::encode(Sha256::digest(canonical.as_bytes())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// One study run: inputs, measurements, fits and verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub study: String,
    pub provenance: Provenance,
    pub scalars: BTreeMap<String, f64>,
    /// Named tables, one map of column values per row.
    pub tables: BTreeMap<String, Vec<BTreeMap<String, f64>>>,
    pub fits: BTreeMap<String, SlopeFit>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl ExperimentRecord {
    pub fn new(study: &str, provenance: Provenance) -> Self {
        Self {
            study: study.to_string(),
            provenance,
            scalars: BTreeMap::new(),
            tables: BTreeMap::new(),
            fits: BTreeMap::new(),
            checks: Vec::new(),
            passed: true,
        }
    }

    pub fn scalar(&mut self, name: &str, value: f64) {
        self.scalars.insert(name.to_string(), value);
    }

    pub fn row(&mut self, table: &str, row: &[(&str, f64)]) {
        self.tables
            .entry(table.to_string())
            .or_default()
            .push(row.iter().map(|(k, v)| (k.to_string(), *v)).collect());
    }

    pub fn fit(&mut self, name: &str, fit: SlopeFit) {
        self.fits.insert(name.to_string(), fit);
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.passed &= passed;
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let fits: Vec<String> = self
            .fits
            .iter()
            .map(|(k, f)| format!("{k} slope={:.4} r2={:.4}", f.slope, f.r2))
            .collect();
        let failed: Vec<&str> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        let verdict = if self.passed { "PASS".to_string() } else { format!("FAIL [{}]", failed.join(", ")) };
        format!("{}: {} | {}", self.study, verdict, fits.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_key_order() {
        let a = serde_json::json!({"nu": 3, "deltas": [0.2, 0.1]});
        let b: serde_json::Value = serde_json::from_str(r#"{"deltas":[0.2,0.1],"nu":3}"#).unwrap();
        assert_eq!(config_hash("x", &a).unwrap(), config_hash("x", &b).unwrap());
        assert_ne!(config_hash("x", &a).unwrap(), config_hash("y", &a).unwrap());
        assert_eq!(config_hash("x", &a).unwrap().len(), 64);
    }

    #[test]
    fn failed_check_fails_record() {
        let g = GridSpec { dim: 1, extent: vec![8.0], points: vec![64] };
        let mut r = ExperimentRecord::new("demo", Provenance::new("demo", &1, 0, g, None).unwrap());
        r.check("a", true, "");
        assert!(r.passed);
        r.check("b", false, "too big");
        assert!(!r.passed);
        assert!(r.summary().contains("FAIL [b]"));
    }
}
