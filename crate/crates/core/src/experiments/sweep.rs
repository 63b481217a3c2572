use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::record::ExperimentRecord;
use super::Study;
use crate::error::{Error, Result};

/// A base study config and axes to expand into their cartesian product.
///
/// ```toml
/// study = "small-dispersion"
/// workers = 4
/// [base]
/// points = 512
/// [axes]
/// nu = [3, 5]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunPlan {
    #[serde(default)]
    pub study: String,
    #[serde(default = "one")]
    pub workers: usize,
    /// Refuse plans that expand to more points than this.
    #[serde(default)]
    pub max_points: Option<usize>,
    #[serde(default)]
    pub base: serde_json::Map<String, serde_json::Value>,
    /// Axis name (dotted for nested keys) to its values; expanded in key order.
    #[serde(default)]
    pub axes: BTreeMap<String, Vec<serde_json::Value>>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointStatus {
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub index: usize,
    pub overrides: BTreeMap<String, serde_json::Value>,
    pub status: PointStatus,
    pub error: Option<String>,
    /// `config`, `numerical` or `io` for failed points.
    pub error_kind: Option<String>,
    pub record: Option<ExperimentRecord>,
}

impl RunPlan {
    pub fn single(study: Study, config: serde_json::Value) -> Result<Self> {
        let base = match config {
            serde_json::Value::Object(m) => m,
            serde_json::Value::Null => serde_json::Map::new(),
            other => return Err(Error::Config(format!("study config must be a table, got {other}"))),
        };
        Ok(Self {
            study: study.name().to_string(),
            workers: 1,
            max_points: None,
            base,
            axes: BTreeMap::new(),
        })
    }

    /// Reads a config file for `study`: either a full plan (with `base` or
    /// `axes` tables) or a bare study config.
    pub fn from_config_text(study: Study, text: &str) -> Result<Self> {
        let value: toml::Table = toml::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
        let is_plan = ["base", "axes", "workers", "max_points"].iter().any(|k| value.contains_key(*k));
        if !is_plan {
            let json = serde_json::to_value(value).map_err(|e| Error::Config(format!("config: {e}")))?;
            return Self::single(study, json);
        }
        let mut plan = Self::from_toml(text)?;
        if plan.study.is_empty() {
            plan.study = study.name().to_string();
        } else if plan.study != study.name() {
            return Err(Error::Config(format!(
                "config is a plan for '{}', not '{}'",
                plan.study, study
            )));
        }
        Ok(plan)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let value: toml::Value = toml::from_str(text).map_err(|e| Error::Config(format!("run plan: {e}")))?;
        let json = serde_json::to_value(value).map_err(|e| Error::Config(format!("run plan: {e}")))?;
        serde_json::from_value(json).map_err(|e| Error::Config(format!("run plan: {e}")))
    }

    /// Overrides for every point, in deterministic order. A plan with an empty
    /// axis has no points.
    pub fn points(&self) -> Vec<BTreeMap<String, serde_json::Value>> {
        let mut out = vec![BTreeMap::new()];
        for (key, values) in &self.axes {
            out = out
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |v| {
                        let mut q = p.clone();
                        q.insert(key.clone(), v.clone());
                        q
                    })
                })
                .collect();
        }
        out
    }

    fn config_for(&self, overrides: &BTreeMap<String, serde_json::Value>) -> Result<serde_json::Value> {
        let mut cfg = serde_json::Value::Object(self.base.clone());
        for (path, v) in overrides {
            let mut slot = &mut cfg;
            for part in path.split('.') {
                let map = slot
                    .as_object_mut()
                    .ok_or_else(|| Error::Config(format!("axis '{path}' descends into a non-table")))?;
                slot = map.entry(part.to_string()).or_insert(serde_json::Value::Object(Default::default()));
            }
            *slot = v.clone();
        }
        Ok(cfg)
    }
}

/// Runs every point of `plan` on a pool of `plan.workers` threads. Failures
/// are recorded per point; results come back in point order.
pub fn sweep(plan: &RunPlan) -> Result<Vec<PointResult>> {
    let study: Study = plan.study.parse()?;
    if plan.workers == 0 {
        return Err(Error::Config("workers must be >= 1".into()));
    }
    let points = plan.points();
    if let Some(max) = plan.max_points {
        if points.len() > max {
            return Err(Error::Config(format!(
                "plan expands to {} points, above max_points = {max}",
                points.len()
            )));
        }
    }
    let run_point = |(index, overrides): (usize, BTreeMap<String, serde_json::Value>)| {
        let outcome = plan.config_for(&overrides).and_then(|cfg| study.run(cfg));
        match outcome {
            Ok(record) => PointResult {
                index,
                overrides,
                status: PointStatus::Ok,
                error: None,
                error_kind: None,
                record: Some(record),
            },
            Err(e) => PointResult {
                index,
                overrides,
                status: PointStatus::Error,
                error: Some(e.to_string()),
                error_kind: Some(e.kind().name().to_string()),
                record: None,
            },
        }
    };
    let indexed: Vec<_> = points.into_iter().enumerate().collect();
    if plan.workers == 1 {
        return Ok(indexed.into_iter().map(run_point).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(|| indexed.into_par_iter().map(run_point).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLAN: &str = r#"
study = "scaling-invariance"
workers = 4
[base]
points = 128
covariance_lambdas = [2.0]
[axes]
nu = [3.0, 5.0]
t_end = [0.1, 0.2]
delta = [0.5, 0.25]
"#;

    #[test]
    fn expansion_is_cartesian_and_ordered() {
        let plan = RunPlan::from_toml(PLAN).unwrap();
        let pts = plan.points();
        assert_eq!(pts.len(), 8);
        assert_eq!(pts[0]["delta"], serde_json::json!(0.5));
        assert_eq!(pts[1]["delta"], serde_json::json!(0.5));
        assert_eq!(pts[1]["nu"], serde_json::json!(3.0));
        assert_eq!(pts[1]["t_end"], serde_json::json!(0.2));
    }

    #[test]
    fn empty_axis_gives_no_records() {
        let mut plan = RunPlan::from_toml(PLAN).unwrap();
        plan.axes.insert("nu".into(), vec![]);
        assert!(sweep(&plan).unwrap().is_empty());
    }

    #[test]
    fn parallel_matches_serial() {
        let plan = RunPlan::from_toml(PLAN).unwrap();
        let par = sweep(&plan).unwrap();
        let ser = sweep(&RunPlan { workers: 1, ..plan }).unwrap();
        assert_eq!(par, ser);
        assert!(par.iter().all(|p| p.status == PointStatus::Ok));
    }

    #[test]
    fn single_point_equals_direct_call() {
        let cfg = serde_json::json!({"points": 128, "covariance_lambdas": [2.0], "t_end": 0.1});
        let plan = RunPlan::single(Study::ScalingInvariance, cfg.clone()).unwrap();
        let res = sweep(&plan).unwrap();
        assert_eq!(res.len(), 1);
        assert_eq!(res[0].record.as_ref().unwrap(), &Study::ScalingInvariance.run(cfg).unwrap());
    }

    #[test]
    fn failures_are_isolated() {
        let mut plan = RunPlan::from_toml(PLAN).unwrap();
        plan.axes = BTreeMap::from([("nu".to_string(), vec![serde_json::json!(3.0), serde_json::json!(0.5)])]);
        let res = sweep(&plan).unwrap();
        assert_eq!(res[0].status, PointStatus::Ok);
        assert_eq!(res[1].status, PointStatus::Error);
        assert!(res[1].error.as_ref().unwrap().contains("nu"));
    }

    #[test]
    fn config_text_is_a_plan_or_a_bare_config() {
        let bare = RunPlan::from_config_text(Study::Conservation, "t_end = 0.5\nmus = [1.0]").unwrap();
        assert_eq!(bare.points().len(), 1);
        assert_eq!(bare.base["t_end"], serde_json::json!(0.5));
        let plan = RunPlan::from_config_text(Study::ScalingInvariance, PLAN).unwrap();
        assert_eq!(plan.points().len(), 8);
        assert!(RunPlan::from_config_text(Study::Conservation, PLAN).is_err());
        let default = Study::LowFrequency.default_config_toml();
        let plan = RunPlan::from_config_text(Study::LowFrequency, &default).unwrap();
        let cfg = plan.config_for(&plan.points()[0]).unwrap();
        let a: super::super::LowFrequencyConfig = serde_json::from_value(cfg).unwrap();
        assert_eq!(a, Default::default());
    }

    #[test]
    fn unknown_keys_and_studies_are_config_errors() {
        assert!(RunPlan::from_toml("study = \"x\"\nbogus = 1").is_err());
        let plan = RunPlan::from_toml("study = \"nope\"").unwrap();
        assert!(matches!(sweep(&plan), Err(Error::Config(_))));
        let plan = RunPlan::single(Study::Conservation, serde_json::json!({"typo": 1})).unwrap();
        assert_eq!(sweep(&plan).unwrap()[0].status, PointStatus::Error);
    }
}
