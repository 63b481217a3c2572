//! Reproduction studies for the small-dispersion, rescaling and ill-posedness
//! constructions, plus conservation, scaling and scattering checks.

mod common;
mod conservation;
mod discontinuity;
mod fit;
mod inflation;
mod initial_norms;
mod low_frequency;
mod profile;
mod record;
mod scaling;
mod scattering;
mod setup;
mod small_dispersion;
mod sweep;

use std::fmt;
use std::str::FromStr;

pub use conservation::{conservation_study, ConservationConfig};
pub use discontinuity::{closed_form_difference, uniform_discontinuity_study, DiscontinuityConfig};
pub use fit::SlopeFit;
pub use inflation::{closed_form_norms, norm_inflation_study, NormInflationConfig};
pub use initial_norms::{initial_norm_scaling_study, InitialNormConfig};
pub use low_frequency::{
    low_frequency_floor, low_frequency_presence, low_frequency_study, LowFrequencyConfig,
};
pub use profile::{build_phi0, Profile};
pub use record::{config_hash, Check, ExperimentRecord, Provenance};
pub use scaling::{co_scaled, scaling_invariance_study, ScalingConfig};
pub use scattering::{scattering_study, ScatteringConfig};
pub use setup::IllposednessSetup;
pub use small_dispersion::{small_dispersion_study, SmallDispersionConfig};
pub use sweep::{sweep, PointResult, PointStatus, RunPlan};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Study {
    SmallDispersion,
    InitialNormScaling,
    NormInflation,
    LowFrequency,
    UniformDiscontinuity,
    Conservation,
    ScalingInvariance,
    ScatteringProbe,
}

impl Study {
    pub const ALL: [Study; 8] = [
        Study::SmallDispersion,
        Study::InitialNormScaling,
        Study::NormInflation,
        Study::LowFrequency,
        Study::UniformDiscontinuity,
        Study::Conservation,
        Study::ScalingInvariance,
        Study::ScatteringProbe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Study::SmallDispersion => small_dispersion::NAME,
            Study::InitialNormScaling => initial_norms::NAME,
            Study::NormInflation => inflation::NAME,
            Study::LowFrequency => low_frequency::NAME,
            Study::UniformDiscontinuity => discontinuity::NAME,
            Study::Conservation => conservation::NAME,
            Study::ScalingInvariance => scaling::NAME,
            Study::ScatteringProbe => scattering::NAME,
        }
    }

    /// Runs the study on a JSON config; absent keys take their defaults.
    pub fn run(self, config: serde_json::Value) -> Result<ExperimentRecord> {
        match self {
            Study::SmallDispersion => small_dispersion::run_value(config),
            Study::InitialNormScaling => initial_norms::run_value(config),
            Study::NormInflation => inflation::run_value(config),
            Study::LowFrequency => low_frequency::run_value(config),
            Study::UniformDiscontinuity => discontinuity::run_value(config),
            Study::Conservation => conservation::run_value(config),
            Study::ScalingInvariance => scaling::run_value(config),
            Study::ScatteringProbe => scattering::run_value(config),
        }
    }

    /// The full default config, as JSON.
    pub fn default_config(self) -> serde_json::Value {
        let v = match self {
            Study::SmallDispersion => serde_json::to_value(SmallDispersionConfig::default()),
            Study::InitialNormScaling => serde_json::to_value(InitialNormConfig::default()),
            Study::NormInflation => serde_json::to_value(NormInflationConfig::default()),
            Study::LowFrequency => serde_json::to_value(LowFrequencyConfig::default()),
            Study::UniformDiscontinuity => serde_json::to_value(DiscontinuityConfig::default()),
            Study::Conservation => serde_json::to_value(ConservationConfig::default()),
            Study::ScalingInvariance => serde_json::to_value(ScalingConfig::default()),
            Study::ScatteringProbe => serde_json::to_value(ScatteringConfig::default()),
        };
        v.expect("default configs serialize")
    }
}

fn strip_nulls(v: serde_json::Value) -> serde_json::Value {
    match v {
        serde_json::Value::Object(m) => serde_json::Value::Object(
            m.into_iter()
                .filter(|(_, v)| !v.is_null())
                .map(|(k, v)| (k, strip_nulls(v)))
                .collect(),
        ),
        other => other,
    }
}

impl Study {
    /// The default config as TOML; optional keys left unset are omitted.
    pub fn default_config_toml(self) -> String {
        toml::to_string(&strip_nulls(self.default_config())).expect("default configs are TOML tables")
    }
}

impl FromStr for Study {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Study::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Study::ALL.iter().map(|s| s.name()).collect();
                Error::Config(format!("unknown study '{s}'; expected one of {}", names.join(", ")))
            })
    }
}

impl fmt::Display for Study {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Re-runs a record's embedded config.
pub fn rerun(record: &ExperimentRecord) -> Result<ExperimentRecord> {
    record.study.parse::<Study>()?.run(record.provenance.config.clone())
}
