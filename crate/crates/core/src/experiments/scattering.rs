use serde::{Deserialize, Serialize};

use super::common::{grid, parse_config};
use super::profile::Profile;
use super::record::{ExperimentRecord, Provenance};
use crate::dynamics::{evolve, scattering_probe, EquationParams, StepControl};
use crate::error::{Error, Result};
use crate::spectral::{sobolev_norm, SobolevSpec};

pub const NAME: &str = "scattering-probe";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScatteringConfig {
    pub nu: f64,
    pub mu: f64,
    pub profile: Profile,
    pub extent: f64,
    pub points: usize,
    pub dt: f64,
    /// Dyadic probe times; must be multiples of `dt`.
    pub times: Vec<f64>,
    /// Norm exponent; `Gamma_c` when absent.
    pub gamma: Option<f64>,
    pub min_decay: f64,
    pub seed: u64,
}

impl Default for ScatteringConfig {
    fn default() -> Self {
        Self {
            nu: 11.0,
            mu: 1.0,
            profile: Profile::Gaussian { amp: 0.8, width: 1.0 },
            extent: 256.0,
            points: 4096,
            dt: 0.002,
            times: vec![1.0, 2.0, 4.0, 8.0],
            gamma: None,
            min_decay: 2.0,
            seed: 0,
        }
    }
}

pub fn run_value(value: serde_json::Value) -> Result<ExperimentRecord> {
    scattering_study(&parse_config(NAME, value)?)
}

/// Cauchy differences of `e^{-tL} u(t)` at dyadic times for small data.
pub fn scattering_study(cfg: &ScatteringConfig) -> Result<ExperimentRecord> {
    let gamma_c = 0.5 - 4.0 / (cfg.nu - 1.0);
    if gamma_c <= 0.0 {
        return Err(Error::Config(format!("scattering probe needs Gamma_c > 0, got {gamma_c}")));
    }
    if cfg.times.len() < 3 {
        return Err(Error::Config("need at least 3 probe times".into()));
    }
    let gamma = cfg.gamma.unwrap_or(gamma_c);
    let steps: Vec<f64> = cfg.times.iter().map(|t| t / cfg.dt).collect();
    if steps.iter().any(|s| (s - s.round()).abs() > 1e-6) {
        return Err(Error::Config(format!("probe times {:?} must be multiples of dt", cfg.times)));
    }
    let stride = steps.iter().fold(0u64, |acc, s| gcd(acc, s.round() as u64)).max(1) as usize;
    let g = grid(1, cfg.extent, cfg.points)?;
    let u0 = cfg.profile.build(&g)?;
    let spec = SobolevSpec::inhomogeneous(gamma);
    let mut rec = ExperimentRecord::new(
        NAME,
        Provenance::new(NAME, cfg, cfg.seed, g.spec().clone(), Some(cfg.dt))?,
    );
    let p = EquationParams::new(1, cfg.nu, cfg.mu, 1.0)?;
    let mut ctrl = StepControl::new(cfg.dt, *cfg.times.last().unwrap());
    ctrl.record_every = stride;
    let traj = evolve(&u0, &ctrl, &p)?;
    let pts = scattering_probe(&traj, &p, &cfg.times, spec)?;
    rec.scalar("gamma", gamma);
    rec.scalar("initial_norm", sobolev_norm(&u0, spec)?);
    rec.scalar("homogeneous_critical_norm", sobolev_norm(&u0, SobolevSpec::homogeneous(gamma_c))?);
    for pt in &pts {
        rec.row("differences", &[("t", pt.t), ("t_next", pt.t_next), ("difference", pt.difference)]);
    }
    let decay: Vec<f64> = pts.windows(2).map(|w| w[0].difference / w[1].difference).collect();
    rec.check(
        "dyadic_decay",
        decay.iter().all(|&r| r >= cfg.min_decay),
        format!("{decay:?}"),
    );
    rec.scalar("min_decay", decay.iter().cloned().fold(f64::MAX, f64::min));
    Ok(rec)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
