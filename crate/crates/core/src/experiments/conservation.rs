use serde::{Deserialize, Serialize};

use super::common::{grid, parse_config};
use super::profile::Profile;
use super::record::{ExperimentRecord, Provenance};
use crate::dynamics::{duhamel_residual, evolve, EquationParams, StepControl};
use crate::error::{Error, Result};
use crate::spectral::{lq_norm, Field};

pub const NAME: &str = "conservation";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConservationConfig {
    pub dim: usize,
    pub nu: f64,
    pub mus: Vec<f64>,
    pub profile: Profile,
    pub extent: f64,
    pub points: usize,
    pub t_end: f64,
    /// Successive halvings of the step.
    pub dts: Vec<f64>,
    pub mass_tol: f64,
    pub energy_ratio: (f64, f64),
    pub order_range: (f64, f64),
    pub duhamel_min_order: f64,
    pub seed: u64,
}

impl Default for ConservationConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            nu: 3.0,
            mus: vec![1.0, -1.0],
            profile: Profile::Gaussian { amp: 1.0, width: 2.0 },
            extent: 16.0,
            points: 256,
            t_end: 1.0,
            dts: vec![0.01, 0.005, 0.0025, 0.00125],
            mass_tol: 1e-10,
            energy_ratio: (3.0, 5.0),
            order_range: (1.8, 2.2),
            duhamel_min_order: 1.8,
            seed: 0,
        }
    }
}

pub fn run_value(value: serde_json::Value) -> Result<ExperimentRecord> {
    conservation_study(&parse_config(NAME, value)?)
}

/// Mass and energy drift, splitting order and Duhamel residual under step halving.
pub fn conservation_study(cfg: &ConservationConfig) -> Result<ExperimentRecord> {
    if cfg.dts.len() < 3 || cfg.dts.windows(2).any(|w| (w[0] / w[1] - 2.0).abs() > 1e-9) {
        return Err(Error::Config(format!("dts must be at least 3 successive halvings, got {:?}", cfg.dts)));
    }
    let g = grid(cfg.dim, cfg.extent, cfg.points)?;
    let phi0 = cfg.profile.build(&g)?;
    let mut rec = ExperimentRecord::new(
        NAME,
        Provenance::new(NAME, cfg, cfg.seed, g.spec().clone(), Some(cfg.dts[0]))?,
    );
    let mut worst_mass: f64 = 0.0;
    for &mu in &cfg.mus {
        let p = EquationParams::new(cfg.dim, cfg.nu, mu, 1.0)?;
        let (mut energy, mut finals, mut duhamel) = (Vec::new(), Vec::<Field>::new(), Vec::new());
        for &dt in &cfg.dts {
            let traj = evolve(&phi0, &StepControl::new(dt, cfg.t_end), &p)?;
            let mass = traj.mass_drift();
            let e = traj.energy_drift();
            let r = duhamel_residual(&traj, &p)?;
            rec.row("runs", &[("mu", mu), ("dt", dt), ("mass_drift", mass), ("energy_drift", e), ("duhamel", r)]);
            worst_mass = worst_mass.max(mass);
            energy.push(e);
            duhamel.push(r);
            finals.push(traj.last().field.clone());
        }
        let tag = if mu > 0.0 { "defocusing" } else { "focusing" };
        let e_ratios: Vec<f64> = energy.windows(2).map(|w| w[0] / w[1]).collect();
        let (lo, hi) = cfg.energy_ratio;
        rec.check(
            &format!("energy_second_order@{tag}"),
            e_ratios.iter().all(|r| (lo..=hi).contains(r)),
            format!("{e_ratios:?}"),
        );
        let mut orders = Vec::new();
        for w in finals.windows(3) {
            let a = lq_norm(&w[0].sub(&w[1])?, 2.0)?;
            let b = lq_norm(&w[1].sub(&w[2])?, 2.0)?;
            orders.push((a / b).log2());
        }
        let (lo, hi) = cfg.order_range;
        rec.check(
            &format!("richardson_order@{tag}"),
            orders.iter().all(|o| (lo..=hi).contains(o)),
            format!("{orders:?}"),
        );
        let d_orders: Vec<f64> = duhamel.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        rec.check(
            &format!("duhamel_order@{tag}"),
            d_orders.iter().all(|&o| o >= cfg.duhamel_min_order),
            format!("{d_orders:?}"),
        );
        for (i, o) in orders.iter().enumerate() {
            rec.row("orders", &[("mu", mu), ("triple", i as f64), ("richardson", *o)]);
        }
        rec.scalar(&format!("min_richardson_order@{tag}"), orders.iter().cloned().fold(f64::MAX, f64::min));
        rec.scalar(&format!("max_richardson_order@{tag}"), orders.iter().cloned().fold(f64::MIN, f64::max));
        rec.scalar(&format!("min_energy_ratio@{tag}"), e_ratios.iter().cloned().fold(f64::MAX, f64::min));
        rec.scalar(&format!("max_energy_ratio@{tag}"), e_ratios.iter().cloned().fold(f64::MIN, f64::max));
        rec.scalar(&format!("min_duhamel_order@{tag}"), d_orders.iter().cloned().fold(f64::MAX, f64::min));
    }
    rec.scalar("max_mass_drift", worst_mass);
    rec.check("mass_conserved", worst_mass < cfg.mass_tol, format!("{worst_mass:.3e}"));
    Ok(rec)
}
