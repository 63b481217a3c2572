use serde::{Deserialize, Serialize};

use super::common::{grid, parse_config, states_at};
use super::fit::SlopeFit;
use super::profile::Profile;
use super::record::{ExperimentRecord, Provenance};
use crate::dynamics::{phase_flow, EquationParams};
use crate::error::{Error, Result};
use crate::spectral::{sobolev_norm, weighted_norm, Field, SobolevSpec, WeightedSpec};

pub const NAME: &str = "small-dispersion";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmallDispersionConfig {
    pub dim: usize,
    pub nu: f64,
    pub mu: f64,
    pub profile: Profile,
    pub extent: f64,
    pub points: usize,
    pub dt: f64,
    pub deltas: Vec<f64>,
    pub t_checks: Vec<f64>,
    pub k: u32,
    /// Required order is `3 - tol`.
    pub tol: f64,
    pub min_r2: f64,
    /// Largest allowed `||u_dt - u_dt/2|| / error` before the run counts as under-resolved.
    pub self_convergence: f64,
    pub seed: u64,
}

impl Default for SmallDispersionConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            nu: 3.0,
            mu: 1.0,
            profile: Profile::gaussian(),
            extent: 16.0,
            points: 512,
            dt: 0.01,
            deltas: vec![0.2, 0.1, 0.05],
            t_checks: vec![1.0],
            k: 1,
            tol: 0.25,
            min_r2: 0.99,
            self_convergence: 0.1,
            seed: 0,
        }
    }
}

impl SmallDispersionConfig {
    fn validate(&self) -> Result<()> {
        if 2 * self.k as usize <= self.dim {
            return Err(Error::Config(format!("k = {} must exceed d/2", self.k)));
        }
        if self.deltas.len() < 3 {
            return Err(Error::Config("need at least 3 dispersion values".into()));
        }
        let r = self.deltas[1] / self.deltas[0];
        let geometric = self.deltas.windows(2).all(|w| {
            w[1] > 0.0 && w[1] < w[0] && ((w[1] / w[0]) - r).abs() <= 1e-9 * r
        });
        if !geometric {
            return Err(Error::Config(format!(
                "deltas must be a decreasing geometric sequence, got {:?}",
                self.deltas
            )));
        }
        if self.t_checks.is_empty() || self.t_checks.iter().any(|&t| !(0.0..=2.0).contains(&t)) {
            return Err(Error::Config(format!("t_checks must lie in [0, 2], got {:?}", self.t_checks)));
        }
        if self.t_checks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("t_checks must be increasing".into()));
        }
        Ok(())
    }
}

pub fn run_value(value: serde_json::Value) -> Result<ExperimentRecord> {
    small_dispersion_study(&parse_config(NAME, value)?)
}

/// Distance of the dispersive solution from the zero-dispersion phase flow
/// as the dispersion shrinks, fitted against `delta^3`.
pub fn small_dispersion_study(cfg: &SmallDispersionConfig) -> Result<ExperimentRecord> {
    cfg.validate()?;
    let g = grid(cfg.dim, cfg.extent, cfg.points)?;
    let phi0 = cfg.profile.build(&g)?;
    let hk = SobolevSpec::inhomogeneous(cfg.k as f64);
    let hkk = WeightedSpec { k: cfg.k as i64 };
    let mut rec = ExperimentRecord::new(
        NAME,
        Provenance::new(NAME, cfg, cfg.seed, g.spec().clone(), Some(cfg.dt))?,
    );

    let p0 = EquationParams::new(cfg.dim, cfg.nu, cfg.mu, 0.0)?;
    let closed: Vec<Field> = cfg
        .t_checks
        .iter()
        .map(|&t| phase_flow(&phi0, t, &p0))
        .collect::<Result<_>>()?;

    // The zero-dispersion solver reproduces the closed form.
    let zero = states_at(&phi0, &p0, cfg.dt, &cfg.t_checks, false)?;
    let mut zero_err: f64 = 0.0;
    for (a, b) in zero.iter().zip(&closed) {
        zero_err = zero_err.max(sobolev_norm(&a.sub(b)?, hk)?);
    }
    rec.scalar("zero_dispersion_error", zero_err);
    rec.check("zero_dispersion_matches_closed_form", zero_err < 1e-9, format!("{zero_err:.3e}"));

    let mut hk_err = vec![Vec::new(); cfg.t_checks.len()];
    let mut hkk_err = vec![Vec::new(); cfg.t_checks.len()];
    for &delta in &cfg.deltas {
        let p = EquationParams::new(cfg.dim, cfg.nu, cfg.mu, delta)?;
        let coarse = states_at(&phi0, &p, cfg.dt, &cfg.t_checks, false)?;
        let fine = states_at(&phi0, &p, 0.5 * cfg.dt, &cfg.t_checks, false)?;
        for (i, &t) in cfg.t_checks.iter().enumerate() {
            let diff = coarse[i].sub(&closed[i])?;
            let e_hk = sobolev_norm(&diff, hk)?;
            let e_hkk = weighted_norm(&diff, hkk)?;
            let self_diff = sobolev_norm(&coarse[i].sub(&fine[i])?, hk)?;
            if t > 0.0 && self_diff > cfg.self_convergence * e_hk {
                return Err(Error::UnderResolved(format!(
                    "delta = {delta}, t = {t}: dt-halving changes the state by {self_diff:.3e}, \
                     comparable to the measured error {e_hk:.3e}"
                )));
            }
            rec.row(
                "errors",
                &[("delta", delta), ("t", t), ("hk", e_hk), ("hkk", e_hkk), ("self_convergence", self_diff)],
            );
            hk_err[i].push(e_hk);
            hkk_err[i].push(e_hkk);
        }
    }

    for (i, &t) in cfg.t_checks.iter().enumerate() {
        if t == 0.0 {
            continue;
        }
        let fk = SlopeFit::loglog(&cfg.deltas, &hk_err[i])?;
        let fkk = SlopeFit::loglog(&cfg.deltas, &hkk_err[i])?;
        let tag = format!("t={t}");
        let need = 3.0 - cfg.tol;
        rec.check(
            &format!("hk_order@{tag}"),
            fk.slope >= need && fk.r2 >= cfg.min_r2,
            format!("slope {:.4} (need >= {need}), r2 {:.5}", fk.slope, fk.r2),
        );
        rec.check(
            &format!("hkk_order@{tag}"),
            fkk.slope >= need && fkk.r2 >= cfg.min_r2,
            format!("slope {:.4} (need >= {need}), r2 {:.5}", fkk.slope, fkk.r2),
        );
        rec.check(
            &format!("hkk_tracks_hk@{tag}"),
            (fkk.slope - fk.slope).abs() <= 0.5,
            format!("{:.4} vs {:.4}", fkk.slope, fk.slope),
        );
        let monotone = hk_err[i].windows(2).all(|w| w[1] < w[0]);
        rec.check(&format!("monotone@{tag}"), monotone, format!("{:?}", hk_err[i]));
        // Halving delta should buy a factor of at least 6.
        let halving: Vec<f64> = cfg
            .deltas
            .windows(2)
            .zip(hk_err[i].windows(2))
            .map(|(d, e)| (e[0] / e[1]).powf(2f64.ln() / (d[0] / d[1]).ln()))
            .collect();
        rec.check(
            &format!("halving_factor@{tag}"),
            halving.iter().all(|&h| h >= 6.0),
            format!("{halving:?}"),
        );
        rec.scalar(&format!("hk_slope@{tag}"), fk.slope);
        rec.scalar(&format!("hk_constant@{tag}"), fk.intercept.exp());
        rec.scalar(&format!("hkk_slope@{tag}"), fkk.slope);
        rec.fit(&format!("hk@{tag}"), fk);
        rec.fit(&format!("hkk@{tag}"), fkk);
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_configs() {
        let mut c = SmallDispersionConfig { k: 0, ..Default::default() };
        assert!(matches!(small_dispersion_study(&c), Err(Error::Config(_))));
        c = SmallDispersionConfig { deltas: vec![0.2, 0.1], ..Default::default() };
        assert!(small_dispersion_study(&c).is_err());
        c = SmallDispersionConfig { deltas: vec![0.2, 0.1, 0.07], ..Default::default() };
        assert!(small_dispersion_study(&c).is_err());
        c = SmallDispersionConfig { t_checks: vec![3.0], ..Default::default() };
        assert!(small_dispersion_study(&c).is_err());
    }

    #[test]
    fn coarse_step_is_flagged_under_resolved() {
        let c = SmallDispersionConfig {
            profile: Profile::Gaussian { amp: 3.0, width: 1.0 },
            dt: 0.5,
            ..Default::default()
        };
        assert!(matches!(small_dispersion_study(&c), Err(Error::UnderResolved(_))));
    }
}
